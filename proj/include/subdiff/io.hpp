#ifndef SUBDIFF_IO_HPP
#define SUBDIFF_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "subdiff/grid.hpp"
#include "subdiff/hierarchical.hpp"
#include "subdiff/testprior.hpp"

namespace subdiff {

/// Column-named table rendered as CSV with '#'-prefixed provenance lines.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  void write_csv(std::ostream& out,
                 const std::vector<std::string>& provenance = {}) const;
};

/// Versioned JSON serialization.  Numbers round-trip exactly.
std::string to_json(const TestPrior& tp, const std::vector<std::string>& provenance = {});
TestPrior test_prior_from_json(const std::string& text);

std::string to_json(const PosteriorGrid& g, const std::vector<std::string>& provenance = {});
PosteriorGrid posterior_grid_from_json(const std::string& text);

std::string to_json(const HierDraws& h, const std::vector<std::string>& provenance = {});
HierDraws hier_draws_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace subdiff

#endif  // SUBDIFF_IO_HPP
