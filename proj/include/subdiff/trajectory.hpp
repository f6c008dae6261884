#ifndef SUBDIFF_TRAJECTORY_HPP
#define SUBDIFF_TRAJECTORY_HPP

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace subdiff {

/// A uniformly sampled 2-D particle path: N+1 positions (microns) at spacing
/// dt (seconds).  Immutable after construction; at least two increments.
struct Trajectory {
  std::string id;
  double dt = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> positions;  // (N+1) x 2

  Eigen::Index n_increments() const { return positions.rows() - 1; }
};

/// First differences of a trajectory: row n = X_{n+1} - X_n.
struct IncrementMatrix {
  double dt = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> x;  // N x 2

  Eigen::Index n() const { return x.rows(); }
};

/// Pathwise MSD estimate at lags k*dt, k = 1..max_lag.
struct MsdCurve {
  std::vector<double> lag_s;
  std::vector<double> value;   // squared microns
  std::vector<int> n_terms;    // N - k + 1 averaged windows per lag
};

/// Parses a delimited text table with header (t,x,y) or (frame,x,y), columns
/// matched case-insensitively, '#' lines skipped.  With a t column the gaps
/// must be uniform to relative tolerance 1e-6 and dt is the median gap; with
/// a frame column expected_dt is required.  Pass expected_dt < 0 for "absent".
Trajectory ingest_csv(std::istream& in, double expected_dt = -1.0,
                      const std::string& id = "");
Trajectory ingest_csv_file(const std::string& path, double expected_dt = -1.0);

void write_csv(std::ostream& out, const Trajectory& traj,
               const std::vector<std::string>& provenance = {});
void write_csv(std::ostream& out, const MsdCurve& msd,
               const std::vector<std::string>& provenance = {});

IncrementMatrix increments(const Trajectory& traj);

/// Pathwise MSD: per coordinate (1/(N-k+1)) sum_n (X_{n+k}-X_n)^2; the 2-D
/// value is the mean of the two 1-D statistics (set sum_coords for the sum
/// convention used by some other software).  detrend subtracts the
/// per-coordinate mean increment before accumulating.
MsdCurve pathwise_msd(const Trajectory& traj, int max_lag, bool detrend,
                      bool sum_coords = false);

int default_max_lag(const Trajectory& traj);  // floor(N/2)

/// Mean-centers positions and rotates onto the eigenvectors of the sample
/// covariance of the detrended increments, largest eigenvalue first.  The
/// first nonzero component of each eigenvector is made positive.
struct PcRotation {
  Trajectory rotated;
  Eigen::Matrix2d rotation;      // columns = eigenvectors
  Eigen::Vector2d eigenvalues;   // descending
};
PcRotation pc_rotation(const Trajectory& traj);

}  // namespace subdiff

#endif  // SUBDIFF_TRAJECTORY_HPP
