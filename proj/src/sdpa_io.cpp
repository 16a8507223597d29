#include "rankbound/sdpa_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "rankbound/errors.hpp"

namespace rankbound {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

// (matno, blkno, i, j) -> value, 1-based, i <= j.
using EntryMap = std::map<std::tuple<int, int, int, int>, double>;

void put(EntryMap& m, int mat, int blk, int i, int j, double v) {
  if (i > j) std::swap(i, j);
  m[{mat, blk, i, j}] += v;
}

double parse_double(const std::string& tok, int line, int col) {
  std::string s = tok;
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("bad number '" + tok + "'", line, col);
  }
  return v;
}

int parse_int(const std::string& tok, int line, int col) {
  const double v = parse_double(tok, line, col);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError("expected an integer, got '" + tok + "'", line, col);
  return static_cast<int>(v);
}

}  // namespace

std::string export_sdpa(const SdpProblem& p, const SdpaOptions& opts) {
  EntryMap entries;
  std::vector<int> sizes;
  int blk = 0;
  for (const AffineBlock& b : p.blocks) {
    ++blk;
    sizes.push_back(b.dim());
    for (int r = 0; r < b.dim(); ++r) {
      for (int c = r; c < b.dim(); ++c) {
        if (b.constant()(r, c) != 0.0) put(entries, 0, blk, r + 1, c + 1, -b.constant()(r, c));
      }
    }
    for (const auto& [v, list] : b.coeffs()) {
      for (const BlockEntry& e : list) put(entries, v + 1, blk, e.row + 1, e.col + 1, e.value);
    }
  }

  auto put_row = [&](const LinearRow& r, int block, int pos, double sign) {
    if (r.constant != 0.0) put(entries, 0, block, pos, pos, -sign * r.constant);
    for (const auto& [v, c] : r.coeffs) put(entries, v + 1, block, pos, pos, sign * c);
  };
  int lp_size = static_cast<int>(p.ineq_rows.size());
  if (!opts.equality_extension) lp_size += 2 * static_cast<int>(p.eq_rows.size());
  if (lp_size > 0) {
    ++blk;
    sizes.push_back(-lp_size);
    int pos = 0;
    for (const LinearRow& r : p.ineq_rows) put_row(r, blk, ++pos, 1.0);
    if (!opts.equality_extension) {
      for (const LinearRow& r : p.eq_rows) {
        put_row(r, blk, ++pos, 1.0);
        put_row(r, blk, ++pos, -1.0);
      }
    }
  }
  int eq_block = 0;
  if (opts.equality_extension && !p.eq_rows.empty()) {
    eq_block = ++blk;
    sizes.push_back(-static_cast<int>(p.eq_rows.size()));
    int pos = 0;
    for (const LinearRow& r : p.eq_rows) put_row(r, blk, ++pos, 1.0);
  }

  std::vector<double> c(static_cast<std::size_t>(p.nvars), 0.0);
  for (const auto& [v, coeff] : p.objective) c[static_cast<std::size_t>(v)] += coeff;

  std::string out;
  if (p.objective_constant != 0.0) out += "*objective_constant " + num(p.objective_constant) + "\n";
  if (eq_block) out += "*equalities " + std::to_string(eq_block) + "\n";
  out += std::to_string(p.nvars) + "\n";
  out += std::to_string(sizes.size()) + "\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? " " : "") + std::to_string(sizes[i]);
  out += "\n";
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? " " : "") + num(c[i]);
  out += "\n";
  for (const auto& [key, v] : entries) {
    if (v == 0.0) continue;
    const auto& [m, b, i, j] = key;
    out += std::to_string(m) + " " + std::to_string(b) + " " + std::to_string(i) + " " + std::to_string(j) + " " +
           num(v) + "\n";
  }
  return out;
}

SdpProblem import_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int eq_block = 0;
  double obj_const = 0.0;
  // Data tokens with their line numbers, after comment handling.
  std::vector<std::pair<std::string, int>> toks;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && !line.empty() && (line[0] == '"' || line[0] == '*')) {
      std::istringstream ss(line.substr(1));
      std::string key, val;
      ss >> key >> val;
      if (key == "equalities") eq_block = parse_int(val, lineno, 2);
      if (key == "objective_constant") obj_const = parse_double(val, lineno, 2);
      continue;
    }
    header = false;
    for (char& ch : line) {
      if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ch = ' ';
    }
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) toks.emplace_back(tok, lineno);
  }
  std::size_t k = 0;
  auto next = [&](const char* what) -> const std::pair<std::string, int>& {
    if (k >= toks.size()) throw ParseError(std::string("unexpected end of file, expected ") + what, lineno, 0);
    return toks[k++];
  };
  auto next_int = [&](const char* what) {
    const auto& t = next(what);
    return parse_int(t.first, t.second, 1);
  };
  auto next_double = [&](const char* what) {
    const auto& t = next(what);
    return parse_double(t.first, t.second, 1);
  };

  // Header values may be followed by free text on the same line ("2 =mDIM").
  auto skip_rest_of_line = [&] {
    const int l = toks[k - 1].second;
    while (k < toks.size() && toks[k].second == l) ++k;
  };
  const int m = next_int("number of variables");
  skip_rest_of_line();
  const int nblocks = next_int("number of blocks");
  skip_rest_of_line();
  if (m < 1 || nblocks < 1) throw ParseError("nonpositive size in header", 1, 1);
  std::vector<int> sizes;
  for (int i = 0; i < nblocks; ++i) {
    const int s = next_int("block size");
    if (s == 0) throw ParseError("zero block size", toks[k - 1].second, i + 1);
    sizes.push_back(s);
  }
  skip_rest_of_line();
  if (eq_block < 0 || eq_block > nblocks || (eq_block > 0 && sizes[static_cast<std::size_t>(eq_block - 1)] > 0)) {
    throw ParseError("equality block must be a diagonal block", 1, 1);
  }

  SdpProblem p;
  p.nvars = m;
  p.objective_constant = obj_const;
  for (int v = 0; v < m; ++v) {
    const double c = next_double("objective coefficient");
    if (c != 0.0) p.objective.emplace_back(v, c);
  }

  std::vector<AffineBlock> dense;
  std::vector<int> dense_index(static_cast<std::size_t>(nblocks), -1);
  // Diagonal blocks: one row per diagonal position.
  std::vector<std::vector<LinearRow>> diag(static_cast<std::size_t>(nblocks));
  for (int b = 0; b < nblocks; ++b) {
    const int s = sizes[static_cast<std::size_t>(b)];
    if (s > 0) {
      dense_index[static_cast<std::size_t>(b)] = static_cast<int>(dense.size());
      dense.emplace_back(s, "block" + std::to_string(b + 1));
    } else {
      const RowSense sense = b + 1 == eq_block ? RowSense::equality : RowSense::geq_zero;
      diag[static_cast<std::size_t>(b)].resize(static_cast<std::size_t>(-s));
      for (auto& r : diag[static_cast<std::size_t>(b)]) r.sense = sense;
    }
  }
  std::vector<std::map<int, double>> row_coeffs;

  while (k < toks.size()) {
    const int line_of = toks[k].second;
    const int mat = next_int("matrix number");
    const int b = next_int("block number");
    int i = next_int("row index");
    int j = next_int("column index");
    const double v = next_double("entry value");
    if (mat < 0 || mat > m) throw ParseError("matrix number out of range", line_of, 1);
    if (b < 1 || b > nblocks) throw ParseError("block number out of range", line_of, 2);
    const int s = sizes[static_cast<std::size_t>(b - 1)];
    const int dim = std::abs(s);
    if (i < 1 || j < 1 || i > dim || j > dim) throw ParseError("entry index out of range", line_of, 3);
    if (i > j) std::swap(i, j);
    if (s > 0) {
      AffineBlock& blk = dense[static_cast<std::size_t>(dense_index[static_cast<std::size_t>(b - 1)])];
      if (mat == 0) {
        blk.add_constant(i - 1, j - 1, -v);
      } else {
        blk.add_coefficient(mat - 1, i - 1, j - 1, v);
      }
    } else {
      if (i != j) throw ParseError("off-diagonal entry in a diagonal block", line_of, 4);
      LinearRow& r = diag[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(i - 1)];
      if (mat == 0) {
        r.constant -= v;
      } else {
        r.coeffs.emplace_back(mat - 1, v);
      }
    }
  }
  p.blocks = std::move(dense);
  for (auto& rows : diag) {
    for (auto& r : rows) {
      std::map<int, double> merged;
      for (const auto& [v, c] : r.coeffs) merged[v] += c;
      r.coeffs.assign(merged.begin(), merged.end());
      std::erase_if(r.coeffs, [](const auto& t) { return t.second == 0.0; });
      p.add_row(std::move(r));
    }
  }
  return p;
}

}  // namespace rankbound
