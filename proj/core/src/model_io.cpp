#include "peer/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <vector>

namespace peer {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("json: cannot open " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw InvalidInputError("json: parse error in " + path + ": " + e.what());
  }
  return doc;
}

void dump_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("json: cannot write " + path);
  }
  out << doc.dump(2) << '\n';
}

}  // namespace

void write_model_json(const std::string& path, const PeerModel& model,
                      const PeerOptions& opts) {
  json layers = json::array();
  for (const auto& layer : model.layers) {
    json indices = json::array();
    json values = json::array();
    for (Index j = 0; j < layer.u_hat.size(); ++j) {
      if (layer.u_hat(j) != 0.0) {
        indices.push_back(j);
        values.push_back(layer.u_hat(j));
      }
    }
    layers.push_back({
        {"k", layer.layer_index},
        {"d_hat", layer.d_hat},
        {"lambda", layer.lambda},
        {"u_hat", {{"size", layer.u_hat.size()},
                   {"indices", std::move(indices)},
                   {"values", std::move(values)}}},
        {"v_hat", vector_to_json(layer.v_hat)},
        {"lasso_converged", layer.lasso_converged},
        {"sweeps_used", layer.sweeps_used},
        {"seconds", layer.seconds},
    });
  }

  const json doc = {
      {"r_hat", model.estimated_rank},
      {"rank", static_cast<Index>(model.layers.size())},
      {"p", model.c_hat.rows()},
      {"q", model.c_hat.cols()},
      {"layers", std::move(layers)},
      {"init",
       {{"iterations_used", model.init.iterations_used},
        {"converged", model.init.converged},
        {"final_relative_change", model.init.final_relative_change},
        {"d_tilde", vector_to_json(model.init.svd.singular_values)},
        {"d_next", model.init.d_next}}},
      {"y_means", vector_to_json(model.y_means)},
      {"config",
       {{"rank", opts.rank},
        {"svt_tolerance", opts.svt_tolerance},
        {"svt_max_iterations", opts.svt_max_iterations},
        {"lambda_grid_size", opts.lambda_grid_size},
        {"lambda_grid_ratio", opts.lambda_grid_ratio},
        {"coord_tolerance", opts.lasso.coord_tolerance},
        {"max_sweeps", opts.lasso.max_sweeps},
        {"kkt_tolerance", opts.lasso.kkt_tolerance},
        {"threads", opts.threads},
        {"center_responses", opts.center_responses}}},
      {"timings",
       {{"init_seconds", model.timings.init_seconds},
        {"layers_seconds", model.timings.layers_seconds},
        {"total_seconds", model.timings.total_seconds}}},
  };
  dump_json_file(path, doc);
}

void write_truth_json(const std::string& path, const GroundTruth& truth,
                      const SimScenario& scn, double sigma) {
  json supports = json::array();
  for (const auto& layer : truth.supports) {
    supports.push_back(layer);
  }
  json scenario = {
      {"study", scn.study},         {"n", scn.n},
      {"p", scn.p},                 {"q", scn.q},
      {"r_star", scn.r_star},       {"snr", scn.snr},
      {"missing_rate", scn.missing_rate},
      {"seed", scn.seed},           {"replicate_id", scn.replicate_id},
  };
  if (scn.study == 1) {
    scenario["s"] = scn.s;
  } else {
    scenario["s_u"] = scn.s_u;
    scenario["s_v"] = scn.s_v;
  }
  const json doc = {
      {"scenario", std::move(scenario)},
      {"sigma", sigma},
      {"d_star", vector_to_json(truth.d_star)},
      {"supports", std::move(supports)},
      {"u_star", matrix_to_json(truth.u_star)},
      {"v_star", matrix_to_json(truth.v_star)},
      {"c_star", matrix_to_json(truth.c_star)},
  };
  dump_json_file(path, doc);
}

SimScenario load_scenario(const std::string& path) {
  const json doc = load_json_file(path);
  SimScenario scn;
  try {
    if (doc.contains("study")) scn.study = doc["study"].get<int>();
    if (doc.contains("n")) scn.n = doc["n"].get<Index>();
    if (doc.contains("p")) scn.p = doc["p"].get<Index>();
    if (doc.contains("q")) scn.q = doc["q"].get<Index>();
    if (doc.contains("r_star")) scn.r_star = doc["r_star"].get<Index>();
    if (doc.contains("s")) scn.s = doc["s"].get<Index>();
    if (doc.contains("s_u")) scn.s_u = doc["s_u"].get<Index>();
    if (doc.contains("s_v")) scn.s_v = doc["s_v"].get<Index>();
    if (doc.contains("snr")) scn.snr = doc["snr"].get<double>();
    if (doc.contains("missing_rate")) {
      scn.missing_rate = doc["missing_rate"].get<double>();
    }
    if (doc.contains("seed")) scn.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("replicate_id")) {
      scn.replicate_id = doc["replicate_id"].get<Index>();
    }
    if (doc.contains("q_u")) {
      scn.q_u.values = doc["q_u"].get<std::vector<double>>();
    }
    if (doc.contains("q_v")) {
      scn.q_v.intervals.clear();
      for (const auto& pair : doc["q_v"]) {
        if (!pair.is_array() || pair.size() != 2) {
          throw InvalidInputError("scenario: q_v must be a list of [lo, hi]");
        }
        scn.q_v.intervals.emplace_back(pair[0].get<double>(),
                                       pair[1].get<double>());
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInputError("scenario: malformed field in " + path + ": " +
                            e.what());
  }
  scn.validate();
  return scn;
}

}  // namespace peer
