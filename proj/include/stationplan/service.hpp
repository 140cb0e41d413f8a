#pragma once

#include <map>
#include <memory>
#include <string>

#include "stationplan/app.hpp"
#include "stationplan/jobs.hpp"

namespace stationplan {

struct ApiRequest {
  std::string method;  // "GET" | "POST"
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

/// Transport-independent HTTP JSON API over a loaded workspace.  Read
/// endpoints touch only the immutable workspace; jobs run on the manager.
class Api {
 public:
  Api(std::shared_ptr<const Workspace> ws, int workers);

  ApiResponse handle(const ApiRequest& req);
  JobManager& jobs() noexcept { return jobs_; }
  const Workspace& workspace() const noexcept { return *ws_; }

 private:
  ApiResponse route(const ApiRequest& req);

  std::shared_ptr<const Workspace> ws_;
  JobManager jobs_;
};

class HttpServerImpl;

/// httplib front end.  bind() picks a free port when given 0.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  std::unique_ptr<HttpServerImpl> impl_;
};

}  // namespace stationplan
