// SPDX-License-Identifier: Apache-2.0
#include "grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace copplace {

using linalg::Mat;
using linalg::Vec;

Grid::Grid(int n_buses, std::vector<Line> lines, std::string name)
    : n_buses_(n_buses), name_(std::move(name)), lines_(std::move(lines)) {
  if (n_buses_ <= 0) throw ValidationError("grid must have at least one bus");
  for (auto& l : lines_) {
    if (l.from == l.to) throw ValidationError("self-loop line");
    if (l.from < 0 || l.to < 0 || l.from >= n_buses_ || l.to >= n_buses_)
      throw ValidationError("line endpoint out of range");
    if (l.from > l.to) std::swap(l.from, l.to);
  }
  std::sort(lines_.begin(), lines_.end(), [](const Line& a, const Line& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  for (std::size_t i = 1; i < lines_.size(); ++i) {
    if (lines_[i].from == lines_[i - 1].from && lines_[i].to == lines_[i - 1].to)
      throw ValidationError("duplicate line between the same bus pair");
  }
  neighbors_.assign(n_buses_, {});
  for (const auto& l : lines_) {
    neighbors_[l.from].push_back(l.to);
    neighbors_[l.to].push_back(l.from);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
  // both orientations, ordered by (from, to)
  directed_.reserve(2 * lines_.size());
  for (int n = 0; n < n_buses_; ++n) {
    for (int m : neighbors_[n]) {
      int li = -1;
      const int lo = std::min(n, m), hi = std::max(n, m);
      auto it = std::lower_bound(lines_.begin(), lines_.end(), std::pair(lo, hi),
                                 [](const Line& l, const std::pair<int, int>& key) {
                                   return std::pair(l.from, l.to) < key;
                                 });
      li = static_cast<int>(it - lines_.begin());
      directed_.push_back(DirectedLine{n, m, li});
    }
  }
}

int Grid::directed_index(int from, int to) const {
  auto it = std::lower_bound(directed_.begin(), directed_.end(), std::pair(from, to),
                             [](const DirectedLine& d, const std::pair<int, int>& key) {
                               return std::pair(d.from, d.to) < key;
                             });
  if (it == directed_.end() || it->from != from || it->to != to) return -1;
  return static_cast<int>(it - directed_.begin());
}

namespace {

bool is_connected(int n, const std::vector<Line>& lines) {
  if (n <= 1) return true;
  std::vector<std::vector<int>> adj(n);
  for (const auto& l : lines) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

struct RawBranch {
  int from_id;
  int to_id;
  double r, x, b;
  int line_no;
};

Grid assemble(const std::vector<int>& bus_ids, std::vector<RawBranch> branches,
              std::string name) {
  std::vector<int> sorted_ids = bus_ids;
  std::sort(sorted_ids.begin(), sorted_ids.end());
  sorted_ids.erase(std::unique(sorted_ids.begin(), sorted_ids.end()), sorted_ids.end());
  if (sorted_ids.size() != bus_ids.size())
    throw ValidationError("duplicate bus id in bus table");
  std::map<int, int> index;
  for (std::size_t i = 0; i < sorted_ids.size(); ++i)
    index[sorted_ids[i]] = static_cast<int>(i);

  // merge parallel branches: admittances add
  std::map<std::pair<int, int>, Line> merged;
  for (const auto& br : branches) {
    auto fit = index.find(br.from_id);
    auto tit = index.find(br.to_id);
    if (fit == index.end() || tit == index.end())
      throw ParseError("branch references unknown bus " +
                           std::to_string(fit == index.end() ? br.from_id : br.to_id),
                       br.line_no);
    if (br.from_id == br.to_id)
      throw ValidationError("self-loop branch at bus " + std::to_string(br.from_id));
    if (br.r == 0.0 && br.x == 0.0)
      throw ParseError("zero-impedance branch", br.line_no);
    int f = fit->second, t = tit->second;
    if (f > t) std::swap(f, t);
    const Complex series = 1.0 / Complex(br.r, br.x);
    const Complex shunt(0.0, br.b / 2.0);
    auto [it, inserted] = merged.try_emplace({f, t}, Line{f, t, series, shunt});
    if (!inserted) {
      it->second.series += series;
      it->second.shunt += shunt;
    }
  }
  std::vector<Line> lines;
  lines.reserve(merged.size());
  for (auto& [key, l] : merged) lines.push_back(l);

  const int n = static_cast<int>(sorted_ids.size());
  if (n == 0) throw ValidationError("empty bus table");
  if (!is_connected(n, lines))
    throw ValidationError("grid graph is disconnected; state is not estimable");
  return Grid(n, std::move(lines), std::move(name));
}

// ---- MATPOWER subset ----

std::string strip_comment(const std::string& line) {
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_numbers(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::string spaced = text;
  for (char& c : spaced)
    if (c == ',' || c == '\t') c = ' ';
  std::istringstream ss(spaced);
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') return false;
    out.push_back(v);
  }
  return true;
}

Grid parse_matpower(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::string name;

  enum class Section { None, Bus, Branch } section = Section::None;
  bool bracket_open = false;
  std::vector<std::vector<double>> bus_rows, branch_rows;
  std::vector<int> bus_row_lines, branch_row_lines;
  bool saw_bus = false, saw_branch = false;

  auto begins_table = [](const std::string& s, const std::string& key) {
    auto pos = s.find(key);
    if (pos == std::string::npos) return false;
    const auto after = pos + key.size();
    // reject longer identifiers such as mpc.bus_name
    if (after < s.size() && (std::isalnum(static_cast<unsigned char>(s[after])) || s[after] == '_'))
      return false;
    return true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string body = strip_comment(line);
    if (section == Section::None) {
      if (auto pos = body.find("function"); pos != std::string::npos) {
        if (auto eq = body.find('='); eq != std::string::npos) {
          std::istringstream ns(body.substr(eq + 1));
          ns >> name;
          if (auto sc = name.find(';'); sc != std::string::npos) name = name.substr(0, sc);
        }
      }
      if (begins_table(body, "mpc.bus")) {
        section = Section::Bus;
        saw_bus = true;
      } else if (begins_table(body, "mpc.branch")) {
        section = Section::Branch;
        saw_branch = true;
      } else {
        continue;
      }
      bracket_open = body.find('[') != std::string::npos;
      auto br = body.find('[');
      body = br == std::string::npos ? "" : body.substr(br + 1);
      if (body.empty() && !bracket_open) continue;
    }
    if (section != Section::None && !bracket_open) {
      auto br = body.find('[');
      if (br == std::string::npos) continue;
      bracket_open = true;
      body = body.substr(br + 1);
    }
    bool closing = false;
    if (auto close = body.find(']'); close != std::string::npos) {
      closing = true;
      body = body.substr(0, close);
    }
    // rows are separated by ';' or newlines
    std::istringstream groups(body);
    std::string group;
    while (std::getline(groups, group, ';')) {
      std::vector<double> nums;
      if (!parse_numbers(group, nums))
        throw ParseError("malformed numeric row in " +
                             std::string(section == Section::Bus ? "bus" : "branch") +
                             " table",
                         line_no);
      if (nums.empty()) continue;
      if (section == Section::Bus) {
        bus_rows.push_back(std::move(nums));
        bus_row_lines.push_back(line_no);
      } else {
        branch_rows.push_back(std::move(nums));
        branch_row_lines.push_back(line_no);
      }
    }
    if (closing) {
      section = Section::None;
      bracket_open = false;
    }
  }

  if (!saw_bus) throw ParseError("missing mpc.bus table");
  if (!saw_branch) throw ParseError("missing mpc.branch table");

  std::vector<int> bus_ids;
  for (std::size_t i = 0; i < bus_rows.size(); ++i) {
    const auto& row = bus_rows[i];
    if (row.empty() || row[0] != std::floor(row[0]) || row[0] <= 0)
      throw ParseError("bus id must be a positive integer", bus_row_lines[i]);
    bus_ids.push_back(static_cast<int>(row[0]));
  }
  std::vector<RawBranch> branches;
  for (std::size_t i = 0; i < branch_rows.size(); ++i) {
    const auto& row = branch_rows[i];
    if (row.size() < 5)
      throw ParseError("branch row needs at least fbus tbus r x b", branch_row_lines[i]);
    if (row.size() >= 11 && row[10] == 0.0) continue;  // out of service
    branches.push_back(RawBranch{static_cast<int>(row[0]), static_cast<int>(row[1]),
                                 row[2], row[3], row[4], branch_row_lines[i]});
  }
  return assemble(bus_ids, std::move(branches), std::move(name));
}

Grid parse_json_case(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("JSON case must be an object");
  int n = 0;
  if (doc.contains("buses"))
    n = doc["buses"].get<int>();
  else if (doc.contains("n_buses"))
    n = doc["n_buses"].get<int>();
  else
    throw ParseError("JSON case missing \"buses\"");
  if (n <= 0) throw ValidationError("bus count must be positive");
  std::vector<int> bus_ids(n);
  for (int i = 0; i < n; ++i) bus_ids[i] = i + 1;

  std::vector<RawBranch> branches;
  if (doc.contains("lines")) {
    if (!doc["lines"].is_array()) throw ParseError("\"lines\" must be an array");
    for (const auto& item : doc["lines"]) {
      RawBranch br{};
      try {
        br.from_id = item.at("from").get<int>();
        br.to_id = item.at("to").get<int>();
        br.r = item.at("r").get<double>();
        br.x = item.at("x").get<double>();
        br.b = item.value("b", 0.0);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad line entry: ") + e.what());
      }
      if (br.from_id < 1 || br.from_id > n || br.to_id < 1 || br.to_id > n)
        throw ValidationError("line endpoint outside 1..buses");
      branches.push_back(br);
    }
  }
  return assemble(bus_ids, std::move(branches), doc.value("name", std::string()));
}

}  // namespace

Grid parse_case(const std::string& text, const std::string& format_hint) {
  std::string hint = format_hint;
  if (hint.empty()) {
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      hint = (c == '{') ? "json" : "matpower";
      break;
    }
    if (hint.empty()) throw ParseError("empty case file");
  }
  if (hint == "json") return parse_json_case(text);
  if (hint == "matpower") return parse_matpower(text);
  throw ValidationError("unknown case format: " + hint);
}

Grid load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open case file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string hint;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") hint = "json";
  if (path.size() > 2 && path.substr(path.size() - 2) == ".m") hint = "matpower";
  return parse_case(buf.str(), hint);
}

AdmittanceMatrix::AdmittanceMatrix(const Grid& grid) : n_(grid.bus_count()) {
  data_.assign(static_cast<std::size_t>(n_) * n_, Complex(0.0, 0.0));
  auto at = [&](int r, int c) -> Complex& { return data_[static_cast<std::size_t>(r) * n_ + c]; };
  for (const auto& l : grid.lines()) {
    at(l.from, l.to) -= l.series;
    at(l.to, l.from) -= l.series;
    at(l.from, l.from) += l.series + l.shunt;
    at(l.to, l.to) += l.series + l.shunt;
  }
}

Complex AdmittanceMatrix::row_sum(int r) const {
  Complex s(0.0, 0.0);
  for (int c = 0; c < n_; ++c) s += at(r, c);
  return s;
}

void QuadForm::gradient(const Vec& v, Vec& row) const {
  p.scatter(row, v[alpha]);
  q.scatter(row, v[beta]);
  row[alpha] += p.dot_dense(v);
  row[beta] += q.dot_dense(v);
}

Mat QuadForm::dense(int dim) const {
  Mat a(dim, dim);
  for (std::size_t k = 0; k < p.idx.size(); ++k) a(alpha, p.idx[k]) = p.val[k];
  for (std::size_t k = 0; k < q.idx.size(); ++k) a(beta, q.idx[k]) = q.val[k];
  return a;
}

Mat QuadForm::dense_symmetrized(int dim) const {
  Mat a = dense(dim);
  for (std::size_t k = 0; k < p.idx.size(); ++k) a(p.idx[k], alpha) += p.val[k];
  for (std::size_t k = 0; k < q.idx.size(); ++k) a(q.idx[k], beta) += q.val[k];
  return a;
}

namespace {

// Builds the two quadratic forms (active, reactive) sharing a complex
// row pattern: row entries a_c = g_c + i b_c at bus columns `cols`.
//   P: p = [ g, -b ],  q = [ b,  g ]
//   Q: p = [-b, -g ],  q = [ g, -b ]
void build_pq_forms(int bus, int n, const std::vector<int>& cols,
                    const std::vector<Complex>& vals, QuadForm& fp, QuadForm& fq) {
  fp.alpha = fq.alpha = bus;
  fp.beta = fq.beta = n + bus;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const int c = cols[k];
    const double g = vals[k].real();
    const double b = vals[k].imag();
    fp.p.add(c, g);
    fp.p.add(n + c, -b);
    fp.q.add(c, b);
    fp.q.add(n + c, g);
    fq.p.add(c, -b);
    fq.p.add(n + c, -g);
    fq.q.add(c, g);
    fq.q.add(n + c, -b);
  }
}

}  // namespace

ConstantMatrixSet::ConstantMatrixSet(const Grid& grid, const AdmittanceMatrix& y)
    : grid_(&grid) {
  const int n = grid.bus_count();
  inj_p_.resize(n);
  inj_q_.resize(n);
  lines_at_.assign(n, {});

  for (int bus = 0; bus < n; ++bus) {
    std::vector<int> cols;
    std::vector<Complex> vals;
    cols.push_back(bus);
    vals.push_back(y.at(bus, bus));
    for (int m : grid.neighbors(bus)) {
      cols.push_back(m);
      vals.push_back(y.at(bus, m));
    }
    build_pq_forms(bus, n, cols, vals, inj_p_[bus], inj_q_[bus]);
  }

  const auto& dl = grid.directed();
  flow_p_.resize(dl.size());
  flow_q_.resize(dl.size());
  cur_i_.resize(dl.size());
  cur_j_.resize(dl.size());
  for (std::size_t d = 0; d < dl.size(); ++d) {
    const Line& l = grid.lines()[dl[d].line];
    const int from = dl[d].from;
    const int to = dl[d].to;
    const Complex a = l.series + l.shunt;  // coefficient of V_from
    const Complex b = -l.series;           // coefficient of V_to
    const std::vector<int> cols{from, to};
    const std::vector<Complex> vals{a, b};
    build_pq_forms(from, n, cols, vals, flow_p_[d], flow_q_[d]);
    // current I + iJ = a V_from + b V_to
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double g = vals[k].real();
      const double bb = vals[k].imag();
      cur_i_[d].add(cols[k], g);
      cur_i_[d].add(n + cols[k], -bb);
      cur_j_[d].add(cols[k], bb);
      cur_j_[d].add(n + cols[k], g);
    }
    lines_at_[from].push_back(static_cast<int>(d));
  }
}

Mat ConstantMatrixSet::c_i(int dline) const {
  const int n = grid_->bus_count();
  const int from = grid_->directed()[dline].from;
  Mat a(2 * n, 2 * n);
  const SparseVec& row = cur_i_[dline];
  // C_I has block-diagonal form [[G, 0], [0, -B]]; the current row
  // [g, -b] splits back into those blocks.
  for (std::size_t k = 0; k < row.idx.size(); ++k) {
    const int c = row.idx[k];
    if (c < n)
      a(from, c) = row.val[k];  // G block
    else
      a(n + from, c) = row.val[k];  // -B block
  }
  return a;
}

Mat ConstantMatrixSet::c_j(int dline) const {
  const int n = grid_->bus_count();
  const int from = grid_->directed()[dline].from;
  Mat a(2 * n, 2 * n);
  const SparseVec& row = cur_j_[dline];
  for (std::size_t k = 0; k < row.idx.size(); ++k) {
    const int c = row.idx[k];
    if (c < n)
      a(from, c) = row.val[k];  // B block
    else
      a(n + from, c) = row.val[k];  // G block
  }
  return a;
}

Mat ConstantMatrixSet::h_i(int bus) const {
  const auto& at = lines_at_[bus];
  Mat h(static_cast<int>(at.size()), state_dim());
  for (std::size_t r = 0; r < at.size(); ++r)
    for (std::size_t k = 0; k < cur_i_[at[r]].idx.size(); ++k)
      h(static_cast<int>(r), cur_i_[at[r]].idx[k]) = cur_i_[at[r]].val[k];
  return h;
}

Mat ConstantMatrixSet::h_j(int bus) const {
  const auto& at = lines_at_[bus];
  Mat h(static_cast<int>(at.size()), state_dim());
  for (std::size_t r = 0; r < at.size(); ++r)
    for (std::size_t k = 0; k < cur_j_[at[r]].idx.size(); ++k)
      h(static_cast<int>(r), cur_j_[at[r]].idx[k]) = cur_j_[at[r]].val[k];
  return h;
}

}  // namespace copplace
