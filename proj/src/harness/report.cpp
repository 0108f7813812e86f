#include "jcpot/harness/report.hpp"

#include <charconv>
#include <ostream>

#include <json.hpp>

#include "jcpot/error.hpp"

namespace jcpot::harness {

namespace {

using Json = nlohmann::ordered_json;

template <typename T>
Json optional_json(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

Json run_to_json(const RunRecord& r, bool include_timing) {
  Json j;
  j["method"] = r.method;
  j["num_sources"] = r.num_sources;
  j["repetition"] = r.repetition;
  j["seed"] = r.seed;
  j["ok"] = r.ok;
  j["error_kind"] = r.error_kind;
  j["error_message"] = r.error_message;
  j["accuracy"] = optional_json(r.accuracy);
  j["h_hat"] = r.h_hat;
  j["l1_error"] = optional_json(r.l1_error);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["h_trace"] = r.h_trace;
  j["mass_leakage"] = optional_json(r.mass_leakage);
  j["evaluated_points"] = r.evaluated_points;
  j["predictions"] = r.predictions;
  j["true_labels"] = r.true_labels;
  if (include_timing) {
    Json timing = Json::object();
    for (const auto& [stage, ms] : r.wall_clock_ms) timing[stage] = ms;
    j["wall_clock_ms"] = timing;
  }
  return j;
}

RunRecord run_from_json(const Json& j) {
  RunRecord r;
  r.method = j.at("method").get<std::string>();
  r.num_sources = j.at("num_sources").get<int>();
  r.repetition = j.at("repetition").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ok = j.at("ok").get<bool>();
  r.error_kind = j.at("error_kind").get<std::string>();
  r.error_message = j.at("error_message").get<std::string>();
  r.accuracy = optional_from<double>(j, "accuracy");
  r.h_hat = j.at("h_hat").get<std::vector<double>>();
  r.l1_error = optional_from<double>(j, "l1_error");
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.h_trace = j.at("h_trace").get<std::vector<double>>();
  r.mass_leakage = optional_from<double>(j, "mass_leakage");
  r.evaluated_points = j.at("evaluated_points").get<std::vector<int>>();
  r.predictions = j.at("predictions").get<std::vector<int>>();
  r.true_labels = j.at("true_labels").get<std::vector<int>>();
  if (j.contains("wall_clock_ms")) {
    for (const auto& [stage, ms] : j.at("wall_clock_ms").items()) {
      r.wall_clock_ms.emplace_back(stage, ms.get<double>());
    }
  }
  return r;
}

Json summary_to_json(const SweepSummary& s) {
  Json j;
  j["method"] = s.method;
  j["num_sources"] = s.num_sources;
  j["runs"] = s.runs;
  j["failures"] = s.failures;
  j["mean_accuracy"] = optional_json(s.mean_accuracy);
  j["std_accuracy"] = optional_json(s.std_accuracy);
  j["mean_l1_error"] = optional_json(s.mean_l1_error);
  j["std_l1_error"] = optional_json(s.std_l1_error);
  return j;
}

SweepSummary summary_from_json(const Json& j) {
  SweepSummary s;
  s.method = j.at("method").get<std::string>();
  s.num_sources = j.at("num_sources").get<int>();
  s.runs = j.at("runs").get<int>();
  s.failures = j.at("failures").get<int>();
  s.mean_accuracy = optional_from<double>(j, "mean_accuracy");
  s.std_accuracy = optional_from<double>(j, "std_accuracy");
  s.mean_l1_error = optional_from<double>(j, "mean_l1_error");
  s.std_l1_error = optional_from<double>(j, "std_l1_error");
  return s;
}

std::string csv_number(const std::optional<double>& x) {
  if (!x) return "";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), *x);
  return std::string(buf, end);
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
  Json j;
  Json methods = Json::array();
  for (Method m : config.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["epsilon"] = config.epsilon;
  j["tol"] = config.tol;
  j["max_iter"] = config.max_iter;
  if (config.lambda.size() == 0) {
    j["lambda"] = "uniform";
  } else {
    j["lambda"] = std::vector<double>(config.lambda.data(), config.lambda.data() + config.lambda.size());
  }
  j["seed"] = config.seed;
  j["repetitions"] = config.repetitions;
  if (config.source_paths.empty()) {
    const auto& g = config.generator;
    Json gen;
    gen["num_sources"] = g.num_sources;
    gen["sources_sweep"] = config.sources_sweep;
    gen["n_source"] = g.n_source;
    gen["n_target"] = g.n_target;
    gen["target_class0"] = g.target_class0;
    gen["prop_low"] = g.prop_low;
    gen["prop_high"] = g.prop_high;
    gen["fixed_sources"] = g.fixed_sources;
    gen["fixed_source_class0"] = g.fixed_source_class0;
    gen["dim"] = g.dim;
    gen["sigma"] = g.sigma;
    gen["separation"] = g.separation;
    j["generator"] = gen;
  } else {
    Json data;
    data["sources"] = config.source_paths;
    data["target"] = config.target_path;
    data["target_labels"] = config.target_labels_path;
    j["data"] = data;
  }
  j["strict"] = config.strict;
  return j.dump();
}

std::string serialize_report(const Report& report, bool include_timing) {
  Json j;
  j["schema_version"] = report.schema_version;
  j["config"] = Json::parse(report.config_json);
  Json summary = Json::array();
  for (const auto& s : report.summary) summary.push_back(summary_to_json(s));
  j["summary"] = summary;
  Json runs = Json::array();
  for (const auto& r : report.runs) runs.push_back(run_to_json(r, include_timing));
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

Report parse_report(std::string_view text) {
  try {
    const Json j = Json::parse(text.begin(), text.end());
    Report report;
    report.schema_version = j.at("schema_version").get<int>();
    if (report.schema_version != kReportSchemaVersion) {
      fail(ErrorKind::kParse, "unsupported report schema version " +
                                  std::to_string(report.schema_version));
    }
    report.config_json = j.at("config").dump();
    for (const auto& s : j.at("summary")) report.summary.push_back(summary_from_json(s));
    for (const auto& r : j.at("runs")) report.runs.push_back(run_from_json(r));
    return report;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("malformed report: ") + e.what());
  }
}

void write_summary_csv(std::ostream& out, const Report& report) {
  out << "num_sources,method,runs,failures,mean_accuracy,std_accuracy,mean_l1_error,std_l1_error\n";
  for (const auto& s : report.summary) {
    out << s.num_sources << ',' << s.method << ',' << s.runs << ',' << s.failures << ','
        << csv_number(s.mean_accuracy) << ',' << csv_number(s.std_accuracy) << ','
        << csv_number(s.mean_l1_error) << ',' << csv_number(s.std_l1_error) << '\n';
  }
}

}  // namespace jcpot::harness
