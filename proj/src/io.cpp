#include "subdiff/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "subdiff/errors.hpp"
#include "subdiff/version.hpp"

namespace subdiff {

using nlohmann::json;

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw usage_error("table row width mismatch");
  rows.push_back(std::move(cells));
}

void Table::write_csv(std::ostream& out,
                      const std::vector<std::string>& provenance) const {
  for (const auto& p : provenance) out << "# " << p << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      out << row[c] << (c + 1 < row.size() ? "," : "\n");
}

namespace {

json meta_block(const std::vector<std::string>& provenance) {
  json meta;
  meta["version"] = kVersion;
  meta["provenance"] = provenance;
  return meta;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto r = j.size();
  if (r == 0) return {};
  const auto c = j[0].size();
  Eigen::MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  return m;
}

void check_format(const json& j, const std::string& expect) {
  if (!j.contains("format") || j["format"].get<std::string>() != expect)
    throw data_error("expected a '" + expect + "' file");
}

Family family_from_string(const std::string& s) {
  if (s == "fbm") return Family::fbm;
  if (s == "gle") return Family::gle;
  throw data_error("unknown family '" + s + "'");
}

}  // namespace

std::string to_json(const TestPrior& tp, const std::vector<std::string>& provenance) {
  json j;
  j["format"] = "subdiff.test_prior/1";
  j["meta"] = meta_block(provenance);
  j["family"] = family_name(tp.family);
  j["n_modes"] = tp.n_modes;
  json mean = json::array();
  for (Eigen::Index i = 0; i < tp.mean.size(); ++i) mean.push_back(tp.mean(i));
  j["mean"] = std::move(mean);
  j["cov"] = matrix_to_json(tp.cov);
  return j.dump(2) + "\n";
}

TestPrior test_prior_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_format(j, "subdiff.test_prior/1");
  TestPrior tp;
  tp.family = family_from_string(j["family"].get<std::string>());
  tp.n_modes = j["n_modes"].get<int>();
  const auto& mean = j["mean"];
  tp.mean.resize(static_cast<Eigen::Index>(mean.size()));
  for (std::size_t i = 0; i < mean.size(); ++i)
    tp.mean(static_cast<Eigen::Index>(i)) = mean[i].get<double>();
  tp.cov = matrix_from_json(j["cov"]);
  if (tp.cov.rows() != tp.mean.size() || tp.cov.cols() != tp.mean.size())
    throw data_error("test prior covariance shape mismatch");
  return tp;
}

std::string to_json(const PosteriorGrid& g, const std::vector<std::string>& provenance) {
  json j;
  j["format"] = "subdiff.posterior_grid/1";
  j["meta"] = meta_block(provenance);
  j["family"] = family_name(g.family);
  j["n_modes"] = g.n_modes;
  j["dt"] = g.dt;
  j["n_obs"] = g.n_obs;
  j["proper_prior"] = g.proper_prior;
  j["relative_evidence"] = g.relative_evidence;
  json nodes = json::array();
  for (const auto& node : g.nodes) {
    json n;
    n["th1"] = node.th1;
    n["th2"] = node.th2;
    n["logw"] = node.logw;
    n["lambda"] = {node.cond.lambda(0), node.cond.lambda(1)};
    n["omega"] = node.cond.omega;
    n["psi"] = {node.cond.psi(0, 0), node.cond.psi(0, 1), node.cond.psi(1, 1)};
    n["nu"] = node.cond.nu;
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  j["quad_w"] = g.quad_w;
  return j.dump() + "\n";
}

PosteriorGrid posterior_grid_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_format(j, "subdiff.posterior_grid/1");
  PosteriorGrid g;
  g.family = family_from_string(j["family"].get<std::string>());
  g.n_modes = j["n_modes"].get<int>();
  g.dt = j["dt"].get<double>();
  g.n_obs = j["n_obs"].get<Eigen::Index>();
  g.proper_prior = j["proper_prior"].get<bool>();
  g.relative_evidence = j["relative_evidence"].get<bool>();
  for (const auto& n : j["nodes"]) {
    PosteriorNode node;
    node.th1 = n["th1"].get<double>();
    node.th2 = n["th2"].get<double>();
    node.logw = n["logw"].get<double>();
    node.cond.lambda << n["lambda"][0].get<double>(), n["lambda"][1].get<double>();
    node.cond.omega = n["omega"].get<double>();
    const double p00 = n["psi"][0].get<double>();
    const double p01 = n["psi"][1].get<double>();
    const double p11 = n["psi"][2].get<double>();
    node.cond.psi << p00, p01, p01, p11;
    node.cond.nu = n["nu"].get<double>();
    node.cond.propriety = Propriety::proper;
    g.nodes.push_back(std::move(node));
  }
  g.quad_w = j["quad_w"].get<std::vector<double>>();
  if (g.quad_w.size() != g.nodes.size())
    throw data_error("posterior grid weight count mismatch");
  // rebuild normalized weights
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& node : g.nodes) mx = std::max(mx, node.logw);
  g.norm_w.resize(g.nodes.size());
  double total = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    g.norm_w[i] = g.quad_w[i] * std::exp(g.nodes[i].logw - mx);
    total += g.norm_w[i];
  }
  for (auto& w : g.norm_w) w /= total;
  return g;
}

std::string to_json(const HierDraws& h, const std::vector<std::string>& provenance) {
  json j;
  j["format"] = "subdiff.hier_draws/1";
  j["meta"] = meta_block(provenance);
  j["d"] = h.d;
  j["omega_exponent"] = h.omega_exponent;
  j["acceptance_rate"] = h.acceptance_rate;
  j["ess_lambda0"] = h.ess_lambda0;
  json l0 = json::array(), o0 = json::array();
  for (const auto& v : h.lambda0) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
    l0.push_back(std::move(row));
  }
  for (const auto& m : h.omega0) o0.push_back(matrix_to_json(m));
  j["lambda0"] = std::move(l0);
  j["omega0"] = std::move(o0);
  return j.dump() + "\n";
}

HierDraws hier_draws_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_format(j, "subdiff.hier_draws/1");
  HierDraws h;
  h.d = j["d"].get<int>();
  h.omega_exponent = j["omega_exponent"].get<double>();
  h.acceptance_rate = j["acceptance_rate"].get<double>();
  h.ess_lambda0 = j["ess_lambda0"].get<std::vector<double>>();
  for (const auto& row : j["lambda0"]) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = row[i].get<double>();
    h.lambda0.push_back(std::move(v));
  }
  for (const auto& m : j["omega0"]) h.omega0.push_back(matrix_from_json(m));
  return h;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << text;
  if (!out) throw data_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace subdiff
