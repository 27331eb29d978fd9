// Model persistence: a JSON document tagged {"format": "nspmine-model",
// "version": 1}. Doubles are written with round-trip precision.

#include <istream>
#include <ostream>

#include "json.hpp"
#include "nspmine/error.hpp"
#include "nspmine/learn.hpp"

namespace nsp {

namespace {

using nlohmann::json;

constexpr int kModelVersion = 1;

json spec_json(const ModelSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"max_iter", s.max_iter},
          {"l2_strength", s.l2_strength},
          {"tolerance", s.tolerance},
          {"neighbors", s.neighbors},
          {"minkowski_p", s.minkowski_p},
          {"min_samples_split", s.min_samples_split},
          {"min_samples_leaf", s.min_samples_leaf},
          {"n_trees", s.n_trees},
          {"variance_floor", s.variance_floor},
          {"standardize", s.standardize},
          {"seed", s.seed}};
}

ModelSpec spec_from(const json& j) {
  ModelSpec s = ModelSpec::defaults(parse_model_kind(j.at("kind").get<std::string>()));
  s.max_iter = j.at("max_iter");
  s.l2_strength = j.at("l2_strength");
  s.tolerance = j.at("tolerance");
  s.neighbors = j.at("neighbors");
  s.minkowski_p = j.at("minkowski_p");
  s.min_samples_split = j.at("min_samples_split");
  s.min_samples_leaf = j.at("min_samples_leaf");
  s.n_trees = j.at("n_trees");
  s.variance_floor = j.at("variance_floor");
  s.standardize = j.at("standardize");
  s.seed = j.at("seed");
  return s;
}

json tree_json(const TreeModel& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"proba", n.proba}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  return nodes;
}

TreeModel tree_from(const json& j) {
  TreeModel t;
  for (const auto& n : j) {
    TreeNode node;
    if (n.contains("proba")) {
      node.proba = n.at("proba").get<std::vector<double>>();
    } else {
      node.feature = n.at("feature");
      node.threshold = n.at("threshold");
      node.left = n.at("left");
      node.right = n.at("right");
    }
    t.nodes.push_back(std::move(node));
  }
  return t;
}

}  // namespace

void TrainedModel::save(std::ostream& out) const {
  json j;
  j["format"] = "nspmine-model";
  j["version"] = kModelVersion;
  j["spec"] = spec_json(spec_);
  j["classes"] = classes_;
  j["features"] = features_;
  j["center"] = center_;
  j["scale"] = scale_;
  json p;
  if (auto* lr = std::get_if<LogisticModel>(&params_)) {
    p = {{"weights", lr->weights}, {"bias", lr->bias}, {"iterations", lr->iterations},
         {"gradient_norm", lr->gradient_norm}};
  } else if (auto* knn = std::get_if<KnnModel>(&params_)) {
    p = {{"x", knn->x}, {"y", knn->y}};
  } else if (auto* nb = std::get_if<NaiveBayesModel>(&params_)) {
    p = {{"log_prior", nb->log_prior}, {"mean", nb->mean}, {"variance", nb->variance}};
  } else if (auto* tree = std::get_if<TreeModel>(&params_)) {
    p = {{"nodes", tree_json(*tree)}};
  } else if (auto* forest = std::get_if<ForestModel>(&params_)) {
    json trees = json::array();
    for (const auto& t : forest->trees) trees.push_back(tree_json(t));
    p = {{"trees", trees}};
  }
  j["params"] = std::move(p);
  out << j.dump() << '\n';
  if (!out) throw IoError("model write failure");
}

TrainedModel TrainedModel::load(std::istream& in) {
  json j;
  try {
    in >> j;
    if (j.at("format") != "nspmine-model") throw ParseError("not an nspmine model");
    if (j.at("version") != kModelVersion) {
      throw ParseError("unsupported model version " + j.at("version").dump());
    }
    ModelSpec spec = spec_from(j.at("spec"));
    const json& p = j.at("params");
    Params params;
    switch (spec.kind) {
      case ModelKind::logistic: {
        LogisticModel lr;
        lr.weights = p.at("weights").get<std::vector<double>>();
        lr.bias = p.at("bias").get<std::vector<double>>();
        lr.iterations = p.at("iterations");
        lr.gradient_norm = p.at("gradient_norm");
        params = std::move(lr);
        break;
      }
      case ModelKind::knn:
        params = KnnModel{p.at("x").get<std::vector<double>>(),
                          p.at("y").get<std::vector<std::size_t>>()};
        break;
      case ModelKind::gaussian_nb:
        params = NaiveBayesModel{p.at("log_prior").get<std::vector<double>>(),
                                 p.at("mean").get<std::vector<double>>(),
                                 p.at("variance").get<std::vector<double>>()};
        break;
      case ModelKind::decision_tree:
        params = tree_from(p.at("nodes"));
        break;
      case ModelKind::random_forest: {
        ForestModel f;
        for (const auto& t : p.at("trees")) f.trees.push_back(tree_from(t));
        params = std::move(f);
        break;
      }
    }
    return TrainedModel(spec, j.at("classes").get<std::vector<std::string>>(),
                        j.at("features"), std::move(params),
                        j.at("center").get<std::vector<double>>(),
                        j.at("scale").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
}

}  // namespace nsp
