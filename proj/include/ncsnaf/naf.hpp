#pragma once

// Normalized advantage function head.
//
//   Q(w, u) = V(w) + A(w, u),   A = -1/2 (u - mu)^T P (u - mu),   P = L L^T
//
// L is read from the l-head in row-major lower-triangle order: row i holds
// entries (i,0) .. (i,i). Diagonal entries are stored pre-exponentiation and
// pass through exp(clamp(., -10, 10)).

#include "ncsnaf/nn.hpp"

namespace ncsnaf::naf {

using nn::Index;
using nn::Matrix;
using nn::Vector;

inline constexpr double kDiagExponentClamp = 10.0;

struct NafRaw {
    double value = 0.0;
    Vector mu;
    Vector l_entries;
};

struct NafEval {
    Matrix L;
    Matrix P;
    double advantage = 0.0;
    double q = 0.0;
};

struct Advantage {
    double value = 0.0;
    Matrix P;
};

struct NafGrads {
    double d_value = 0.0;
    Vector d_mu;
    Vector d_l;
};

Matrix assemble_L(const Vector& l_entries, Index m);

// A = -1/2 |L^T (u - mu)|^2, which equals -1/2 d^T P d but cannot round
// above zero.
Advantage advantage(const Vector& u, const Vector& mu, const Matrix& L);

inline double q_value(double value, double advantage) { return value + advantage; }

NafEval evaluate(const NafRaw& raw, const Vector& u);

// Partial derivatives of dQ * Q with respect to V, mu and the raw l entries.
NafGrads naf_backward(const NafRaw& raw, const Vector& u, double dQ);

// Column-wise Q for a batch of head outputs and actions (m x B).
Matrix batch_q(const nn::HeadOutputs& heads, const Matrix& actions);

// Column-wise naf_backward; dQ is 1 x B.
nn::HeadGrads batch_backward(const nn::HeadOutputs& heads, const Matrix& actions, const Matrix& dQ);

NafRaw column(const nn::HeadOutputs& heads, Index b);

} // namespace ncsnaf::naf
