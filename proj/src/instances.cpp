#include "rankbound/instances.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rankbound/errors.hpp"

namespace rankbound {

namespace {

void expect_params(const std::string& name, const std::vector<double>& p, std::size_t lo, std::size_t hi) {
  if (p.size() < lo || p.size() > hi) {
    throw ParamRange("family '" + name + "' expects " + std::to_string(lo) +
                     (hi != lo ? ".." + std::to_string(hi) : "") + " parameters, got " + std::to_string(p.size()));
  }
}

int as_count(const std::string& name, double v) {
  if (v < 1 || v != std::floor(v) || v > 1000) {
    throw ParamRange("family '" + name + "' needs a positive integer size");
  }
  return static_cast<int>(v);
}

Eigen::MatrixXd from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::string format_params(const std::vector<double>& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::ostringstream os;
    os.precision(17);
    os << p[i];
    out += (i ? "," : ":") + os.str();
  }
  return out;
}

}  // namespace

std::vector<std::string> families() {
  return {"A_alpha",      "nonneg2x2",      "identity",         "circulant5",         "cos2_circulant5",
          "bipartite",    "nested_slack",   "slack_quadrilateral", "slack_hexagon",   "slack_hexagon_scaled",
          "circulant3"};
}

MatrixInstance gen(const std::string& name, const std::vector<double>& p) {
  MatrixInstance inst;
  inst.provenance = "gen " + name + format_params(p);
  Eigen::MatrixXd& A = inst.values;
  if (name == "A_alpha") {
    expect_params(name, p, 1, 1);
    A = from_rows({{1.0, p[0]}, {p[0], 1.0}});
  } else if (name == "nonneg2x2") {
    expect_params(name, p, 1, 1);
    A = from_rows({{1.0, 1.0}, {1.0, p[0]}});
  } else if (name == "identity") {
    expect_params(name, p, 1, 1);
    const int k = as_count(name, p[0]);
    A = Eigen::MatrixXd::Identity(k, k);
  } else if (name == "circulant5") {
    expect_params(name, p, 1, 1);
    A = Eigen::MatrixXd::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
      A(i, i) = 1.0;
      A(i, (i + 1) % 5) = p[0];
      A(i, (i + 4) % 5) = p[0];
    }
  } else if (name == "cos2_circulant5") {
    expect_params(name, p, 0, 0);
    A.resize(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double c = std::cos((i - j) * 4.0 * M_PI / 5.0);
        A(i, j) = c * c;
      }
    }
  } else if (name == "bipartite") {
    expect_params(name, p, 2, 4);
    const int pp = p.size() > 2 ? as_count(name, p[2]) : 2;
    const int qq = p.size() > 3 ? as_count(name, p[3]) : 3;
    const int n = pp + qq;
    A = Eigen::MatrixXd::Zero(n, n);
    A.topLeftCorner(pp, pp) = (p[0] + qq) * Eigen::MatrixXd::Identity(pp, pp);
    A.bottomRightCorner(qq, qq) = (p[1] + pp) * Eigen::MatrixXd::Identity(qq, qq);
    A.topRightCorner(pp, qq).setOnes();
    A.bottomLeftCorner(qq, pp).setOnes();
  } else if (name == "nested_slack") {
    expect_params(name, p, 2, 2);
    const double a = p[0];
    const double b = p[1];
    A = from_rows({{1 - a, 1 + a, 1 - b, 1 + b},
                   {1 + a, 1 - a, 1 - b, 1 + b},
                   {1 + a, 1 - a, 1 + b, 1 - b},
                   {1 - a, 1 + a, 1 + b, 1 - b}});
  } else if (name == "slack_quadrilateral") {
    expect_params(name, p, 0, 0);
    A = from_rows({{0, 0, 2, 2}, {1, 0, 0, 3}, {0, 1, 3, 0}, {2, 2, 0, 0}});
  } else if (name == "slack_hexagon" || name == "slack_hexagon_scaled") {
    expect_params(name, p, 0, 0);
    A = from_rows({{0, 1, 2, 2, 1, 0},
                   {0, 0, 1, 2, 2, 1},
                   {1, 0, 0, 1, 2, 2},
                   {2, 1, 0, 0, 1, 2},
                   {2, 2, 1, 0, 0, 1},
                   {1, 2, 2, 1, 0, 0}});
    if (name == "slack_hexagon_scaled") {
      A.row(0) *= 2.0;
      A.row(1) *= 2.0;
    }
  } else if (name == "circulant3") {
    expect_params(name, p, 2, 2);
    const double b = p[0];
    const double c = p[1];
    A = from_rows({{1, b, c}, {c, 1, b}, {b, c, 1}});
  } else {
    throw UnknownFamily("unknown matrix family '" + name + "'");
  }
  for (Eigen::Index i = 0; i < A.size(); ++i) {
    if (!std::isfinite(A.data()[i])) {
      throw ParamRange("family '" + name + "' produced a non-finite entry");
    }
  }
  return inst;
}

MatrixInstance gen_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::stringstream ss(rest);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',')) {
      ++col;
      double v = 0.0;
      const char* first = tok.data();
      const char* last = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw ParseError("bad generator parameter '" + tok + "'", 1, col);
      }
      params.push_back(v);
    }
  }
  return gen(name, params);
}

MatrixInstance parse_matrix(const std::string& text, const std::string& provenance) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> tokens;
    if (line.find(',') != std::string::npos) {
      std::stringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, ',')) tokens.push_back(tok);
      if (line.back() == ',') tokens.emplace_back();
    } else {
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      std::string tok = tokens[c];
      const auto b = tok.find_first_not_of(" \t");
      const auto e = tok.find_last_not_of(" \t");
      tok = b == std::string::npos ? std::string() : tok.substr(b, e - b + 1);
      const int col = static_cast<int>(c) + 1;
      if (tok.empty()) throw ParseError("empty field", lineno, col);
      if (tok.front() == '+') tok.erase(0, 1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("not a number: '" + tok + "'", lineno, col);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite entry", lineno, col);
      row.push_back(v);
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError("ragged row: expected " + std::to_string(width) + " entries, got " + std::to_string(row.size()),
                       lineno, static_cast<int>(std::min(row.size(), width)) + 1);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no matrix rows", lineno, 0);
  MatrixInstance inst;
  inst.provenance = provenance;
  inst.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      inst.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return inst;
}

MatrixInstance load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), path);
}

MatrixTags checks(const Eigen::MatrixXd& A, double tol) {
  MatrixTags tags;
  tags.nonneg = A.size() == 0 || A.minCoeff() >= -tol;
  if (A.rows() != A.cols()) return tags;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  tags.symmetric = (A - A.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
  if (tags.symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    tags.psd = es.eigenvalues().minCoeff() >= -tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return tags;
}

Eigen::MatrixXd normalize_diagonal(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw ParamRange("diagonal normalization needs a square matrix");
  Eigen::VectorXd d(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (A(i, i) < 0) throw ParamRange("negative diagonal entry");
    d[i] = A(i, i) > 0 ? 1.0 / std::sqrt(A(i, i)) : 1.0;
  }
  return d.asDiagonal() * A * d.asDiagonal();
}

}  // namespace rankbound
