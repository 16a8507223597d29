#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankbound/affine.hpp"
#include "rankbound/moment_table.hpp"
#include "rankbound/polynomial.hpp"

namespace rankbound {

// M_t(L): rows/columns indexed by tab.basis(t), entry (u, v) = L(u* v).
AffineBlock moment_block(const MomentTable& tab, std::string label = "moment");

// M_{t - ceil(deg g / 2)}(g L). Throws EmptyBlock if the index degree is negative.
AffineBlock localizing_block(const MomentTable& tab, const Polynomial& g, std::string label = {});

// Entry (u, v) = L(u* g v g2) over basis words of degree <= t - ceil((deg g + deg g2) / 2).
AffineBlock bilinear_block(const MomentTable& tab, const Polynomial& g, const Polynomial& g2,
                           std::string label = {});

// L(p h) = 0 for all basis words p with deg(p h) <= 2t, deduplicated.
std::vector<LinearRow> ideal_rows(const MomentTable& tab, const std::vector<Polynomial>& T);

// L(g u) >= 0 for g in {1} u S and monomials u with deg(g u) <= 2t. Commutative mode only.
std::vector<LinearRow> scalar_positivity_rows(const MomentTable& tab, const std::vector<Polynomial>& S);

// Q_l A^{(x)l} Q_l^T - (L(m m'))_{m, m'} over monomials of degree exactly l.
AffineBlock tensor_block(const MomentTable& tab, const Eigen::MatrixXd& A, int l);

// Constant part of the tensor block, computed by summing over word fibers.
Eigen::MatrixXd tensor_constant(const Eigen::MatrixXd& A, int l);

// Words whose commutative image is the sorted word m.
std::vector<Word> fiber(const Word& m);

}  // namespace rankbound
