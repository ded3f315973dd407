#include "ncsnaf/naf.hpp"

#include "ncsnaf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncsnaf::naf {

namespace {

Index tri_index(Index i, Index j) { return i * (i + 1) / 2 + j; }

double clamp_exponent(double raw) { return std::clamp(raw, -kDiagExponentClamp, kDiagExponentClamp); }

bool exponent_in_range(double raw) { return raw >= -kDiagExponentClamp && raw <= kDiagExponentClamp; }

// Fills L (m x m, zeroed upper part) from a strided column of raw entries.
template <class Entries>
void fill_L(const Entries& l, Index m, Matrix& L) {
    L.setZero(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < i; ++j)
            L(i, j) = l(tri_index(i, j));
        L(i, i) = std::exp(clamp_exponent(l(tri_index(i, i))));
    }
}

// s = L^T d, returns -1/2 |s|^2
double advantage_of(const Matrix& L, const Vector& d, Vector& s) {
    s.noalias() = L.transpose() * d;
    return -0.5 * s.squaredNorm();
}

void check_head_shapes(const nn::HeadOutputs& heads, const Matrix& actions) {
    const Index m = heads.mu.rows();
    const Index batch = heads.mu.cols();
    require_dims(actions.rows() == m && actions.cols() == batch, "action batch shape does not match mu head");
    require_dims(heads.value.rows() == 1 && heads.value.cols() == batch, "value head batch shape mismatch");
    require_dims(heads.l.rows() == nn::triangle_size(m) && heads.l.cols() == batch,
                 "l head batch shape mismatch");
}

} // namespace

Matrix assemble_L(const Vector& l_entries, Index m) {
    require_dims(m >= 1, "action dimension must be >= 1");
    require_dims(l_entries.size() == nn::triangle_size(m),
                 "l entries length " + std::to_string(l_entries.size()) + " != m(m+1)/2 = " +
                     std::to_string(nn::triangle_size(m)));
    Matrix L;
    fill_L(l_entries, m, L);
    return L;
}

Advantage advantage(const Vector& u, const Vector& mu, const Matrix& L) {
    const Index m = mu.size();
    require_dims(u.size() == m && L.rows() == m && L.cols() == m, "advantage operands have inconsistent dimensions");
    Vector s;
    Advantage out;
    out.value = advantage_of(L, u - mu, s);
    out.P = L * L.transpose();
    return out;
}

NafEval evaluate(const NafRaw& raw, const Vector& u) {
    NafEval e;
    e.L = assemble_L(raw.l_entries, raw.mu.size());
    auto a = advantage(u, raw.mu, e.L);
    e.P = std::move(a.P);
    e.advantage = a.value;
    e.q = q_value(raw.value, a.value);
    return e;
}

NafGrads naf_backward(const NafRaw& raw, const Vector& u, double dQ) {
    const Index m = raw.mu.size();
    require_dims(u.size() == m, "action length does not match mu");
    const Matrix L = assemble_L(raw.l_entries, m);
    const Vector d = u - raw.mu;
    const Vector s = L.transpose() * d;

    NafGrads g;
    g.d_value = dQ;
    g.d_mu = dQ * (L * s); // dA/dmu = P d
    g.d_l = Vector::Zero(nn::triangle_size(m));
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < i; ++j)
            g.d_l(tri_index(i, j)) = -dQ * s(j) * d(i);
        const double raw_diag = raw.l_entries(tri_index(i, i));
        g.d_l(tri_index(i, i)) = exponent_in_range(raw_diag) ? -dQ * s(i) * d(i) * L(i, i) : 0.0;
    }
    return g;
}

NafRaw column(const nn::HeadOutputs& heads, Index b) {
    return {heads.value(0, b), heads.mu.col(b), heads.l.col(b)};
}

Matrix batch_q(const nn::HeadOutputs& heads, const Matrix& actions) {
    check_head_shapes(heads, actions);
    const Index m = heads.mu.rows();
    const Index batch = heads.mu.cols();
    Matrix q(1, batch);
    Matrix L;
    Vector d(m), s(m);
    for (Index b = 0; b < batch; ++b) {
        fill_L(heads.l.col(b), m, L);
        d = actions.col(b) - heads.mu.col(b);
        q(0, b) = q_value(heads.value(0, b), advantage_of(L, d, s));
    }
    return q;
}

nn::HeadGrads batch_backward(const nn::HeadOutputs& heads, const Matrix& actions, const Matrix& dQ) {
    check_head_shapes(heads, actions);
    const Index m = heads.mu.rows();
    const Index batch = heads.mu.cols();
    require_dims(dQ.rows() == 1 && dQ.cols() == batch, "dQ batch shape mismatch");

    nn::HeadGrads g;
    g.value = dQ;
    g.mu.resize(m, batch);
    g.l.setZero(nn::triangle_size(m), batch);
    Matrix L;
    Vector d(m), s(m);
    for (Index b = 0; b < batch; ++b) {
        const double dq = dQ(0, b);
        fill_L(heads.l.col(b), m, L);
        d = actions.col(b) - heads.mu.col(b);
        s.noalias() = L.transpose() * d;
        g.mu.col(b) = dq * (L * s);
        for (Index i = 0; i < m; ++i) {
            for (Index j = 0; j < i; ++j)
                g.l(tri_index(i, j), b) = -dq * s(j) * d(i);
            const double raw_diag = heads.l(tri_index(i, i), b);
            g.l(tri_index(i, i), b) = exponent_in_range(raw_diag) ? -dq * s(i) * d(i) * L(i, i) : 0.0;
        }
    }
    return g;
}

} // namespace ncsnaf::naf
