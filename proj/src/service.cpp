#include "stationplan/service.hpp"

#include <charconv>
#include <regex>

#include <httplib.h>

#include "stationplan/error.hpp"

namespace stationplan {

namespace {

int status_for(const std::string& code) {
  if (code == errc::kNotFound) return 404;
  if (code == errc::kValidation || code == errc::kInvalidArgument || code == errc::kOutOfBounds ||
      code == errc::kShapeMismatch || code == errc::kInsufficientHistory) {
    return 422;
  }
  if (code == errc::kParse) return 400;
  return 500;
}

ApiResponse fail(int status, const std::string& code, const std::string& message) {
  return {status, error_json(code, message)};
}

double query_number(const ApiRequest& req, const std::string& name, double fallback) {
  const auto it = req.query.find(name);
  if (it == req.query.end()) return fallback;
  double v = 0.0;
  const char* first = it->second.data();
  const char* last = first + it->second.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(errc::kValidation, "query '" + name + "' must be a number");
  return v;
}

Json parse_body(const std::string& body) {
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw Error(errc::kParse, std::string("malformed JSON body: ") + e.what());
  }
}

}  // namespace

Api::Api(std::shared_ptr<const Workspace> ws, int workers) : ws_(std::move(ws)), jobs_(workers) {}

ApiResponse Api::handle(const ApiRequest& req) {
  try {
    return route(req);
  } catch (const Error& e) {
    return fail(status_for(e.code()), e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(500, "internal", e.what());
  }
}

ApiResponse Api::route(const ApiRequest& req) {
  static const std::regex kProfile(R"(^/api/station/([^/]+)/profile$)");
  static const std::regex kJob(R"(^/api/jobs/([^/]+)$)");
  static const std::regex kJobResult(R"(^/api/jobs/([^/]+)/result$)");
  static const std::regex kPareto(R"(^/api/solutions/([^/]+)/pareto$)");
  const Workspace& ws = *ws_;
  const double k_default = ws.config.k_minutes;
  std::smatch m;

  if (req.method == "GET") {
    if (req.path == "/api/health") return {200, {{"status", "ok"}, {"forecast", ws.forecast_status}}};
    if (req.path == "/api/stats/yearly") return {200, yearly_counts_json(yearly_counts(ws.window_fires))};
    if (req.path == "/api/stats/response") return {200, to_json(response_distribution(ws.window_fires))};
    if (req.path == "/api/stats/stations") {
      const auto rows = station_summaries(ws.window_fires, ws.stations);
      return {200, to_json(std::span<const StationSummary>(rows))};
    }
    if (req.path == "/api/sd-series") return {200, sd_series_payload(ws)};
    if (req.path == "/api/grid") {
      std::optional<YearMonth> month;
      if (const auto it = req.query.find("month"); it != req.query.end()) {
        month = YearMonth::parse(it->second);
        if (!month) return fail(422, errc::kValidation, "month must be YYYY-MM");
      }
      return {200, grid_payload(ws, month)};
    }
    if (req.path == "/api/reachability") return {200, reachability_payload(ws, query_number(req, "k", k_default))};
    if (req.path == "/api/underserved") return {200, underserved_payload(ws, query_number(req, "k", k_default))};
    if (std::regex_match(req.path, m, kProfile)) {
      const double hours = query_number(req, "sector_hours", 4.0);
      if (hours != static_cast<int>(hours)) return fail(422, errc::kValidation, "sector_hours must be an integer");
      return {200, station_profile_payload(ws, m[1], query_number(req, "k", k_default), static_cast<int>(hours))};
    }
    if (std::regex_match(req.path, m, kJob)) {
      const auto snap = jobs_.get(m[1]);
      if (!snap) return fail(404, errc::kNotFound, "unknown job '" + std::string(m[1]) + "'");
      return {200, to_json(*snap)};
    }
    if (std::regex_match(req.path, m, kJobResult) || std::regex_match(req.path, m, kPareto)) {
      const bool pareto = req.path.ends_with("/pareto");
      const auto snap = jobs_.get(m[1]);
      if (!snap) return fail(404, errc::kNotFound, "unknown job '" + std::string(m[1]) + "'");
      if (pareto && snap->kind != JobKind::Optimize) return fail(404, errc::kNotFound, "job is not an optimization");
      if (snap->state == JobState::Failed) return {409, {{"error", snap->error}}};
      if (snap->state != JobState::Done) return fail(409, "not_ready", "job is " + std::string(to_string(snap->state)));
      return {200, *snap->result};
    }
  } else if (req.method == "POST") {
    if (req.path == "/api/optimize") {
      auto opt = parse_optimize_request(parse_body(req.body), ws);
      const std::string key = opt.area_json.dump();
      const auto id = jobs_.submit(JobKind::Optimize, key, [ws = ws_, opt](const JobManager::ProgressSink& sink) {
        return run_optimize(*ws, opt, [&](int done, int total) {
          return sink(static_cast<double>(done) / static_cast<double>(total));
        });
      });
      return {202, to_json(*jobs_.get(id))};
    }
    if (req.path == "/api/simulate") {
      auto sim = parse_simulate_request(parse_body(req.body), ws);
      const auto id = jobs_.submit(JobKind::Simulate, "", [ws = ws_, sim](const JobManager::ProgressSink&) {
        return run_simulate(*ws, sim);
      });
      return {202, to_json(*jobs_.get(id))};
    }
    if (req.path == "/api/evaluate") return {200, evaluate_payload(ws, parse_body(req.body))};
  } else {
    return fail(405, "method_not_allowed", "unsupported method " + req.method);
  }
  return fail(404, errc::kNotFound, "no route for " + req.method + " " + req.path);
}

class HttpServerImpl {
 public:
  explicit HttpServerImpl(Api& api) : api_(api) {
    const auto bridge = [this](const httplib::Request& hreq, httplib::Response& hres) {
      ApiRequest req{hreq.method, hreq.path, {}, hreq.body};
      for (const auto& [k, v] : hreq.params) req.query[k] = v;
      const ApiResponse res = api_.handle(req);
      hres.status = res.status;
      hres.set_content(res.body.dump(), "application/json");
    };
    server_.Get(R"(/api/.*)", bridge);
    server_.Post(R"(/api/.*)", bridge);
  }

  httplib::Server server_;

 private:
  Api& api_;
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<HttpServerImpl>(api)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server_.bind_to_any_port(host);
    if (p < 0) throw Error(errc::kIo, "cannot bind " + host);
    return p;
  }
  if (!impl_->server_.bind_to_port(host, port)) {
    throw Error(errc::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server_.listen_after_bind(); }
void HttpServer::stop() { impl_->server_.stop(); }

}  // namespace stationplan
