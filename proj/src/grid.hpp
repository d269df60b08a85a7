// SPDX-License-Identifier: Apache-2.0
//
// Network topology, case-file parsing and the constant matrices that
// define power-flow quantities as linear/quadratic forms of the
// rectangular state v = [Re V; Im V].
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace copplace {

using Complex = std::complex<double>;

struct Line {
  int from = 0;  // 0-based bus index, from < to
  int to = 0;
  Complex series;  // Y_nm = 1/(r + ix)
  Complex shunt;   // per-end shunt, i*b/2 in the pi model
};

/// One orientation of a line; flow/current measurements are taken at the
/// `from` end. Both orientations of every line are enumerated, sorted by
/// (from, to).
struct DirectedLine {
  int from = 0;
  int to = 0;
  int line = 0;  // index into Grid::lines
};

class Grid {
 public:
  Grid(int n_buses, std::vector<Line> lines, std::string name = "");

  int bus_count() const { return n_buses_; }
  int line_count() const { return static_cast<int>(lines_.size()); }
  int directed_count() const { return 2 * line_count(); }
  const std::string& name() const { return name_; }

  const std::vector<Line>& lines() const { return lines_; }
  const std::vector<DirectedLine>& directed() const { return directed_; }
  const std::vector<int>& neighbors(int bus) const { return neighbors_[bus]; }
  int degree(int bus) const { return static_cast<int>(neighbors_[bus].size()); }

  /// Index into directed() for the line (from -> to); -1 when absent.
  int directed_index(int from, int to) const;

 private:
  int n_buses_;
  std::string name_;
  std::vector<Line> lines_;
  std::vector<DirectedLine> directed_;
  std::vector<std::vector<int>> neighbors_;
};

/// Parses a MATPOWER-style case (mpc.bus / mpc.branch tables) or the
/// native JSON grid schema; format is auto-detected unless `format_hint`
/// is "matpower" or "json". Bus ids are reindexed deterministically to
/// 1..N in ascending id order; parallel branches are merged (admittances
/// add). Throws ParseError / ValidationError.
Grid parse_case(const std::string& text, const std::string& format_hint = "");
Grid load_case_file(const std::string& path);

/// Bus admittance matrix: diagonal sum(Y_nm + Ybar_nm) over neighbors,
/// off-diagonal -Y_nm on lines.
class AdmittanceMatrix {
 public:
  explicit AdmittanceMatrix(const Grid& grid);

  int order() const { return n_; }
  Complex at(int r, int c) const { return data_[static_cast<std::size_t>(r) * n_ + c]; }
  Complex row_sum(int r) const;

 private:
  int n_;
  std::vector<Complex> data_;
};

/// Sparse vector over the 2N state indices.
struct SparseVec {
  std::vector<int> idx;
  std::vector<double> val;

  void add(int i, double v) {
    idx.push_back(i);
    val.push_back(v);
  }
  double dot_dense(const linalg::Vec& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * x[idx[k]];
    return s;
  }
  void scatter(linalg::Vec& out, double scale = 1.0) const {
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += scale * val[k];
  }
};

/// One quadratic form v^T A v with A = e_alpha p^T + e_beta q^T
/// (the shape shared by every injection/flow matrix). Knows how to
/// evaluate itself, its gradient row, and its contribution to gain-type
/// sums without densifying.
struct QuadForm {
  int alpha = 0;  // row n
  int beta = 0;   // row N+n
  SparseVec p;    // column pattern of row alpha
  SparseVec q;    // column pattern of row beta

  double value(const linalg::Vec& v) const {
    return v[alpha] * p.dot_dense(v) + v[beta] * q.dot_dense(v);
  }
  /// gradient = v^T (A + A^T), written into `row` (size 2N, zero-filled by caller)
  void gradient(const linalg::Vec& v, linalg::Vec& row) const;
  linalg::Mat dense(int dim) const;             // A
  linalg::Mat dense_symmetrized(int dim) const; // A + A^T
};

/// Constant matrices of the measurement model, grouped per bus
/// (injections, PMU current stacks) and per directed line (flows,
/// currents). Dense accessors exist for verification; computation paths
/// use the sparse forms.
class ConstantMatrixSet {
 public:
  ConstantMatrixSet(const Grid& grid, const AdmittanceMatrix& y);

  const Grid& grid() const { return *grid_; }
  int state_dim() const { return 2 * grid_->bus_count(); }

  // quadratic SCADA forms
  const QuadForm& injection_p(int bus) const { return inj_p_[bus]; }
  const QuadForm& injection_q(int bus) const { return inj_q_[bus]; }
  const QuadForm& flow_p(int dline) const { return flow_p_[dline]; }
  const QuadForm& flow_q(int dline) const { return flow_q_[dline]; }

  // linear PMU current rows (real and imaginary part of the line current
  // measured at the from end)
  const SparseVec& current_i_row(int dline) const { return cur_i_[dline]; }
  const SparseVec& current_j_row(int dline) const { return cur_j_[dline]; }

  // dense Appendix-style constructors, primarily for tests
  linalg::Mat n_p(int bus) const { return inj_p_[bus].dense(state_dim()); }
  linalg::Mat n_q(int bus) const { return inj_q_[bus].dense(state_dim()); }
  linalg::Mat e_p(int dline) const { return flow_p_[dline].dense(state_dim()); }
  linalg::Mat e_q(int dline) const { return flow_q_[dline].dense(state_dim()); }
  linalg::Mat c_i(int dline) const;
  linalg::Mat c_j(int dline) const;
  /// L_n x 2N stack of current rows measured at `bus` (S_n C_{I,n}).
  linalg::Mat h_i(int bus) const;
  linalg::Mat h_j(int bus) const;
  /// Directed-line indices measured at `bus`, in enumeration order.
  const std::vector<int>& lines_at(int bus) const { return lines_at_[bus]; }

 private:
  const Grid* grid_;
  std::vector<QuadForm> inj_p_, inj_q_;
  std::vector<QuadForm> flow_p_, flow_q_;
  std::vector<SparseVec> cur_i_, cur_j_;
  std::vector<std::vector<int>> lines_at_;
};

}  // namespace copplace
