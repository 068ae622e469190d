#include "ningarch/network.hpp"

#include <stdexcept>

namespace ningarch {

namespace {

void check_dims(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                const Eigen::VectorXd& x) {
    if (weights.size() != kind.param_count(int(x.size())))
        throw std::invalid_argument("weight vector does not match response layout");
    if (x.size() < 1) throw std::invalid_argument("empty input vector");
}

}  // namespace

ForwardState forward(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                     const Eigen::VectorXd& x) {
    check_dims(kind, weights, x);
    ForwardState s;
    if (!kind.neural()) {
        s.out_preact = weights.dot(x);
        s.output = activation_eval(kind.output, s.out_preact);
        return s;
    }
    const int J = int(x.size());
    const int H = kind.hidden;
    const auto w0 = Eigen::Map<const Eigen::MatrixXd>(weights.data(), J, H);
    const auto w1 = weights.segment(J * H, H);
    s.preact = w0.transpose() * x;
    s.hidden.resize(H);
    for (int h = 0; h < H; ++h) s.hidden[h] = logistic(s.preact[h]);
    s.out_preact = w1.dot(s.hidden);
    s.output = activation_eval(kind.output, s.out_preact);
    return s;
}

Eigen::VectorXd backward(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                         const Eigen::VectorXd& x, const ForwardState& state,
                         double outer_error) {
    check_dims(kind, weights, x);
    const double g1p = activation_deriv(kind.output, state.out_preact);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(weights.size());
    if (!kind.neural()) {
        grad = (outer_error * g1p) * x;
        return grad;
    }
    const int J = int(x.size());
    const int H = kind.hidden;
    if (state.hidden.size() != H)
        throw std::logic_error("forward cache does not match response layout");
    const auto w1 = weights.segment(J * H, H);
    auto gw0 = Eigen::Map<Eigen::MatrixXd>(grad.data(), J, H);
    auto gw1 = grad.segment(J * H, H);
    gw1 = (outer_error * g1p) * state.hidden;
    for (int h = 0; h < H; ++h) {
        const double zh = state.hidden[h];
        gw0.col(h) = (outer_error * g1p * w1[h] * zh * (1.0 - zh)) * x;
    }
    return grad;
}

Eigen::VectorXd param_gradient(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& x) {
    return backward(kind, weights, x, forward(kind, weights, x), 1.0);
}

Eigen::VectorXd input_gradient(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& x, const ForwardState& state) {
    check_dims(kind, weights, x);
    const double g1p = activation_deriv(kind.output, state.out_preact);
    if (!kind.neural()) return g1p * weights;
    const int J = int(x.size());
    const int H = kind.hidden;
    const auto w0 = Eigen::Map<const Eigen::MatrixXd>(weights.data(), J, H);
    const auto w1 = weights.segment(J * H, H);
    Eigen::VectorXd gx = Eigen::VectorXd::Zero(J);
    for (int h = 0; h < H; ++h) {
        const double zh = state.hidden[h];
        gx += (w1[h] * zh * (1.0 - zh)) * w0.col(h);
    }
    return g1p * gx;
}

}  // namespace ningarch
