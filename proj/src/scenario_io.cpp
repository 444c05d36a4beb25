#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "abwlab/harness.hpp"

namespace abw::harness {

namespace {

using nlohmann::json;

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

std::string kind_name(netsim::CrossKind kind) {
    switch (kind) {
        case netsim::CrossKind::kCbr: return "CBR";
        case netsim::CrossKind::kExponential: return "EXPONENTIAL";
        case netsim::CrossKind::kPareto: return "PARETO";
    }
    throw Error("unreachable cross-traffic kind");
}

json cross_to_json(const netsim::CrossTrafficModel& model) {
    json j{{"kind", kind_name(model.kind())},
           {"mean_rate_mbps", model.mean_rate().mbps()},
           {"packet_size_bits", model.packet_size_bits()}};
    if (model.kind() == netsim::CrossKind::kPareto)
        j["pareto_shape"] = model.pareto_shape();
    return j;
}

netsim::CrossTrafficModel cross_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const RateMbps rate(j.at("mean_rate_mbps").get<double>());
    const auto bits = j.value("packet_size_bits", kDefaultPacketBits);
    if (kind == "PARETO") {
        reject_unknown_keys(j, {"kind", "mean_rate_mbps", "packet_size_bits", "pareto_shape"},
                            "cross_traffic");
        return netsim::CrossTrafficModel::pareto(rate, j.value("pareto_shape", 1.5), bits);
    }
    reject_unknown_keys(j, {"kind", "mean_rate_mbps", "packet_size_bits"}, "cross_traffic");
    if (kind == "CBR") return netsim::CrossTrafficModel::cbr(rate, bits);
    if (kind == "EXPONENTIAL") return netsim::CrossTrafficModel::exponential(rate, bits);
    throw ConfigError("unknown cross-traffic kind '" + kind + "'");
}

json link_to_json(const netsim::SimLink& link) {
    return json{{"capacity_mbps", link.capacity().mbps()},
                {"cross_traffic", cross_to_json(link.cross_traffic())},
                {"propagation_delay_s", link.propagation_delay_seconds()}};
}

netsim::SimLink link_from_json(const json& j) {
    reject_unknown_keys(j, {"capacity_mbps", "cross_traffic", "propagation_delay_s"},
                        "path link");
    return netsim::SimLink(RateMbps(j.at("capacity_mbps").get<double>()),
                           cross_from_json(j.at("cross_traffic")),
                           j.value("propagation_delay_s", 0.0));
}

json config_to_json_obj(const ScenarioConfig& c) {
    json links = json::array();
    for (const auto& link : c.path) links.push_back(link_to_json(link));
    return json{{"name", c.name},
                {"path", links},
                {"probe",
                 {{"packet_size_bits", c.probe_packet_size_bits},
                  {"packet_count", c.probe_packet_count}}},
                {"grid", {{"increment_mbps", c.grid_increment_mbps}, {"count", c.grid_count}}},
                {"bandit", {{"epsilon", c.epsilon}, {"gamma", c.gamma}}},
                {"kalman", {{"lambda_tuning", c.kalman_lambda}}},
                {"steps", c.steps},
                {"kalman_streams", c.kalman_streams},
                {"repetitions", c.repetitions},
                {"master_seed", c.master_seed.value},
                {"timestamp_jitter_sd", c.timestamp_jitter_sd}};
}

ScenarioConfig config_from_json_obj(const json& j) {
    reject_unknown_keys(j,
                        {"name", "path", "probe", "grid", "bandit", "kalman", "steps",
                         "kalman_streams", "repetitions", "master_seed",
                         "timestamp_jitter_sd"},
                        "scenario");
    ScenarioConfig c;
    c.name = j.value("name", std::string{});
    if (!j.contains("path") || !j.at("path").is_array() || j.at("path").empty())
        throw ConfigError("scenario must list at least one path link");
    for (const auto& link : j.at("path")) c.path.push_back(link_from_json(link));

    if (j.contains("probe")) {
        const json& p = j.at("probe");
        reject_unknown_keys(p, {"packet_size_bits", "packet_count"}, "probe");
        c.probe_packet_size_bits = p.value("packet_size_bits", c.probe_packet_size_bits);
        c.probe_packet_count = p.value("packet_count", c.probe_packet_count);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown_keys(g, {"increment_mbps", "count"}, "grid");
        c.grid_increment_mbps = g.value("increment_mbps", c.grid_increment_mbps);
        c.grid_count = g.value("count", c.grid_count);
    }
    if (j.contains("bandit")) {
        const json& b = j.at("bandit");
        reject_unknown_keys(b, {"epsilon", "gamma"}, "bandit");
        c.epsilon = b.value("epsilon", c.epsilon);
        c.gamma = b.value("gamma", c.gamma);
    }
    if (j.contains("kalman")) {
        const json& k = j.at("kalman");
        reject_unknown_keys(k, {"lambda_tuning"}, "kalman");
        c.kalman_lambda = k.value("lambda_tuning", c.kalman_lambda);
    }
    c.steps = j.value("steps", c.steps);
    c.kalman_streams = j.value("kalman_streams", c.kalman_streams);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.master_seed.value = j.value("master_seed", c.master_seed.value);
    c.timestamp_jitter_sd = j.value("timestamp_jitter_sd", c.timestamp_jitter_sd);
    c.validate();
    return c;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + file.string());
}

void append_step_rows(std::ostringstream& csv, Method method,
                      const MethodSeries& series) {
    for (const StepAggregate& row : series.per_step)
        csv << row.step << ',' << method_name(method) << ','
            << fmt_g(row.mean_estimate_mbps) << ',' << fmt_g(row.sd_mbps) << ','
            << fmt_g(row.mean_reward) << ',' << row.probe_bits_cum << '\n';
}

json series_to_json(const MethodSeries& series) {
    json rows = json::array();
    for (const StepAggregate& row : series.per_step)
        rows.push_back(json{{"step", row.step},
                            {"mean_estimate_mbps", row.mean_estimate_mbps},
                            {"sd_mbps", row.sd_mbps},
                            {"mean_reward", row.mean_reward},
                            {"probe_bits_cum", row.probe_bits_cum}});
    return rows;
}

json summary_json(const ScenarioResult& result) {
    json summary{{"scenario", result.config.name},
                 {"true_available_mbps", result.true_available_mbps},
                 {"repetitions", result.config.repetitions},
                 {"master_seed", result.config.master_seed.value}};
    auto method_summary = [&](const MethodSeries& series, const char* steps_key,
                              int steps) {
        const StepAggregate& last = series.per_step.back();
        return json{{steps_key, steps},
                    {"final_mean_estimate_mbps", last.mean_estimate_mbps},
                    {"final_sd_mbps", last.sd_mbps}};
    };
    if (result.bandit)
        summary["bandit"] = method_summary(*result.bandit, "steps", result.config.steps);
    if (result.kalman)
        summary["kalman"] =
            method_summary(*result.kalman, "streams", result.config.kalman_streams);
    return summary;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) {
    return config_to_json_obj(config).dump(2) + "\n";
}

ScenarioConfig scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return config_from_json_obj(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario config: ") + e.what());
    }
}

ScenarioConfig load_scenario_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    return scenario_from_json(text.str());
}

std::vector<std::filesystem::path> emit_results(const ScenarioResult& result,
                                                OutputFormat format,
                                                const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());
    const std::string stem = result.config.name.empty() ? "scenario" : result.config.name;

    std::vector<std::filesystem::path> written;

    if (format == OutputFormat::kCsv) {
        std::ostringstream csv;
        csv << "step,method,mean_estimate_mbps,sd_mbps,mean_reward,probe_bits_cum\n";
        if (result.bandit) append_step_rows(csv, Method::kBandit, *result.bandit);
        if (result.kalman) append_step_rows(csv, Method::kKalman, *result.kalman);
        const auto steps_path = out_dir / (stem + "_steps.csv");
        write_text_file(steps_path, csv.str());
        written.push_back(steps_path);

        // plot-ready: one row per step index, mean and SD per method
        std::ostringstream curve;
        curve << "step,bandit_mean_mbps,bandit_sd_mbps,kalman_mean_mbps,kalman_sd_mbps\n";
        const std::size_t rows =
            std::max(result.bandit ? result.bandit->per_step.size() : 0,
                     result.kalman ? result.kalman->per_step.size() : 0);
        for (std::size_t s = 0; s < rows; ++s) {
            curve << (s + 1);
            for (const auto& series : {result.bandit, result.kalman}) {
                if (series && s < series->per_step.size())
                    curve << ',' << fmt_g(series->per_step[s].mean_estimate_mbps) << ','
                          << fmt_g(series->per_step[s].sd_mbps);
                else
                    curve << ",,";
            }
            curve << '\n';
        }
        const auto curve_path = out_dir / (stem + "_curve.csv");
        write_text_file(curve_path, curve.str());
        written.push_back(curve_path);
    } else {
        json steps{{"scenario", result.config.name},
                   {"true_available_mbps", result.true_available_mbps}};
        if (result.bandit) steps["bandit"] = series_to_json(*result.bandit);
        if (result.kalman) steps["kalman"] = series_to_json(*result.kalman);
        const auto steps_path = out_dir / (stem + "_steps.json");
        write_text_file(steps_path, steps.dump(2) + "\n");
        written.push_back(steps_path);
    }

    const auto summary_path = out_dir / (stem + "_summary.json");
    write_text_file(summary_path, summary_json(result).dump(2) + "\n");
    written.push_back(summary_path);
    return written;
}

}  // namespace abw::harness
