#include "subdiff/trajectory.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"

namespace subdiff {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

Trajectory ingest_csv(std::istream& in, double expected_dt, const std::string& id) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw data_error("empty trajectory file");

  int col_t = -1, col_frame = -1, col_x = -1, col_y = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const std::string h = lower(header[i]);
    if (h == "t" || h == "time" || h == "time_s") col_t = i;
    else if (h == "frame") col_frame = i;
    else if (h == "x") col_x = i;
    else if (h == "y") col_y = i;
  }
  if (col_x < 0 || col_y < 0 || (col_t < 0 && col_frame < 0))
    throw data_error("trajectory CSV needs columns (t,x,y) or (frame,x,y)");
  const int col_time = col_t >= 0 ? col_t : col_frame;

  std::vector<double> tv, xv, yv;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    const int needed = std::max({col_time, col_x, col_y});
    if (static_cast<int>(fields.size()) <= needed)
      throw data_error("row " + std::to_string(lineno) + ": too few fields");
    double t, x, y;
    try {
      t = std::stod(fields[col_time]);
      x = std::stod(fields[col_x]);
      y = std::stod(fields[col_y]);
    } catch (const std::exception&) {
      throw data_error("row " + std::to_string(lineno) + ": non-numeric value");
    }
    if (!std::isfinite(t) || !std::isfinite(x) || !std::isfinite(y))
      throw data_error("row " + std::to_string(lineno) + ": non-finite value");
    tv.push_back(t);
    xv.push_back(x);
    yv.push_back(y);
  }
  if (tv.size() < 3) throw data_error("need at least 3 rows (two increments)");

  std::vector<double> gaps(tv.size() - 1);
  for (std::size_t i = 0; i + 1 < tv.size(); ++i) gaps[i] = tv[i + 1] - tv[i];
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[sorted.size() / 2];
  if (!(med > 0)) throw data_error("non-increasing time/frame column");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (std::abs(gaps[i] - med) > 1e-6 * med)
      throw data_error("non-uniform sampling at row " + std::to_string(i + 3) +
                       " (gap " + format_full(gaps[i]) + " vs median " +
                       format_full(med) + ")");
  }

  double dt;
  if (col_t >= 0) {
    dt = med;
  } else {
    if (expected_dt <= 0)
      throw data_error("frame-indexed file: expected_dt (--dt) is required");
    dt = expected_dt;
  }

  Trajectory traj;
  traj.id = id;
  traj.dt = dt;
  traj.positions.resize(static_cast<Eigen::Index>(tv.size()), 2);
  for (std::size_t i = 0; i < tv.size(); ++i) {
    traj.positions(static_cast<Eigen::Index>(i), 0) = xv[i];
    traj.positions(static_cast<Eigen::Index>(i), 1) = yv[i];
  }
  return traj;
}

Trajectory ingest_csv_file(const std::string& path, double expected_dt) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  try {
    std::string id = path;
    const auto slash = id.find_last_of('/');
    if (slash != std::string::npos) id = id.substr(slash + 1);
    const auto dot = id.find_last_of('.');
    if (dot != std::string::npos) id = id.substr(0, dot);
    return ingest_csv(in, expected_dt, id);
  } catch (const data_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const Trajectory& traj,
               const std::vector<std::string>& provenance) {
  for (const auto& p : provenance) out << "# " << p << "\n";
  out << "t,x,y\n";
  for (Eigen::Index i = 0; i < traj.positions.rows(); ++i)
    out << format_full(i * traj.dt) << ',' << format_full(traj.positions(i, 0))
        << ',' << format_full(traj.positions(i, 1)) << "\n";
}

void write_csv(std::ostream& out, const MsdCurve& msd,
               const std::vector<std::string>& provenance) {
  for (const auto& p : provenance) out << "# " << p << "\n";
  out << "lag_s,msd_um2,n_terms\n";
  for (std::size_t k = 0; k < msd.lag_s.size(); ++k)
    out << format_full(msd.lag_s[k]) << ',' << format_full(msd.value[k]) << ','
        << msd.n_terms[k] << "\n";
}

IncrementMatrix increments(const Trajectory& traj) {
  const Eigen::Index n = traj.n_increments();
  IncrementMatrix inc;
  inc.dt = traj.dt;
  inc.x = traj.positions.bottomRows(n) - traj.positions.topRows(n);
  return inc;
}

int default_max_lag(const Trajectory& traj) {
  return static_cast<int>(traj.n_increments() / 2);
}

MsdCurve pathwise_msd(const Trajectory& traj, int max_lag, bool detrend,
                      bool sum_coords) {
  const Eigen::Index n = traj.n_increments();
  if (max_lag < 1 || max_lag > n)
    throw usage_error("max_lag must be in [1, N]");

  Eigen::Matrix<double, Eigen::Dynamic, 2> pos = traj.positions;
  if (detrend) {
    // subtract the mean increment, rebuild positions by cumulative sum
    const Eigen::RowVector2d mean_inc =
        (pos.row(n) - pos.row(0)) / static_cast<double>(n);
    for (Eigen::Index i = 1; i <= n; ++i) pos.row(i) -= i * mean_inc;
  }

  MsdCurve out;
  out.lag_s.resize(max_lag);
  out.value.resize(max_lag);
  out.n_terms.resize(max_lag);
  for (int k = 1; k <= max_lag; ++k) {
    const Eigen::Index m = n - k + 1;  // windows
    double acc0 = 0.0, acc1 = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      acc0 += sq(pos(i + k, 0) - pos(i, 0));
      acc1 += sq(pos(i + k, 1) - pos(i, 1));
    }
    const double s0 = acc0 / m, s1 = acc1 / m;
    out.lag_s[k - 1] = k * traj.dt;
    out.value[k - 1] = sum_coords ? (s0 + s1) : 0.5 * (s0 + s1);
    out.n_terms[k - 1] = static_cast<int>(m);
  }
  return out;
}

PcRotation pc_rotation(const Trajectory& traj) {
  const IncrementMatrix inc = increments(traj);
  const Eigen::RowVector2d mean_inc = inc.x.colwise().mean();
  const Eigen::Matrix<double, Eigen::Dynamic, 2> centered =
      inc.x.rowwise() - mean_inc;
  Eigen::Matrix2d cov =
      centered.transpose() * centered / static_cast<double>(inc.n());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Eigen::Vector2d evals = es.eigenvalues();   // ascending
  Eigen::Matrix2d evecs = es.eigenvectors();
  evals.reverseInPlace();
  evecs = evecs.rowwise().reverse().eval();   // descending eigenvalue order
  if (!(evals(1) > 0))
    throw numeric_error("degenerate increment covariance in pc_rotation");
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < 2; ++r) {
      if (evecs(r, c) != 0.0) {
        if (evecs(r, c) < 0.0) evecs.col(c) = -evecs.col(c);
        break;
      }
    }
  }

  PcRotation out;
  out.rotation = evecs;
  out.eigenvalues = evals;
  out.rotated.id = traj.id;
  out.rotated.dt = traj.dt;
  const Eigen::RowVector2d mean_pos = traj.positions.colwise().mean();
  out.rotated.positions = (traj.positions.rowwise() - mean_pos) * evecs;
  return out;
}

}  // namespace subdiff
