#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rankbound {

struct MatrixInstance {
  Eigen::MatrixXd values;
  std::string provenance;
};

struct MatrixTags {
  bool symmetric = false;
  bool psd = false;
  bool nonneg = false;
};

// Families: A_alpha:a, nonneg2x2:a, identity:k, circulant5:a, cos2_circulant5,
// bipartite:a,b[,p,q], nested_slack:a,b, slack_quadrilateral, slack_hexagon,
// slack_hexagon_scaled, circulant3:b,c.
MatrixInstance gen(const std::string& name, const std::vector<double>& params = {});
// "name" or "name:p1,p2,...".
MatrixInstance gen_spec(const std::string& spec);
std::vector<std::string> families();

// Comma- or whitespace-separated rows; '#' starts a comment. Throws ParseError.
MatrixInstance parse_matrix(const std::string& text, const std::string& provenance = "<text>");
MatrixInstance load(const std::string& path);

// Tags decided with tolerance tol (PSD: min eigenvalue >= -tol * max(1, |A|)).
MatrixTags checks(const Eigen::MatrixXd& A, double tol = 1e-9);

// D A D with D = diag(A_ii)^{-1/2}; zero diagonal entries are left unscaled.
Eigen::MatrixXd normalize_diagonal(const Eigen::MatrixXd& A);

}  // namespace rankbound
