#pragma once

#include <Eigen/Dense>

#include "ningarch/activations.hpp"

namespace ningarch {

/// Response function of the conditional-mean recursion: either a single
/// hidden layer network (hidden > 0, logistic hidden units) or the
/// degenerate conventional response g1(x . beta) (hidden == 0).
struct ResponseSpec {
    int hidden = 0;  ///< number of hidden units H; 0 means degenerate
    Activation output = Activation::Softplus;

    bool neural() const { return hidden > 0; }
    /// Parameter count for input dimension J: J*H + H (neural) or J (degenerate).
    int param_count(int input_dim) const {
        return neural() ? input_dim * hidden + hidden : input_dim;
    }
};

/// Cached intermediate values from a forward pass, reused by backward().
struct ForwardState {
    Eigen::VectorXd preact;  ///< hidden pre-activations (H), empty if degenerate
    Eigen::VectorXd hidden;  ///< hidden activations (H), each in (0,1)
    double out_preact = 0.0;
    double output = 0.0;
};

/// Flat weight layout: column-major input->hidden matrix w0 (J*H entries,
/// hidden unit h occupies [h*J, (h+1)*J)), then the hidden->output vector w1
/// (H entries). Degenerate: just beta (J entries). No bias terms; the
/// constant is input slot x[0] = 1.
ForwardState forward(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                     const Eigen::VectorXd& x);

/// outer_error * df/dw in the flat layout, reusing the forward cache.
Eigen::VectorXd backward(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                         const Eigen::VectorXd& x, const ForwardState& state,
                         double outer_error);

/// df/dw at x (backward with outer_error = 1); used for delta-method bands.
Eigen::VectorXd param_gradient(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& x);

/// df/dx at x. Needed when lagged conditional means feed back (q > 0).
Eigen::VectorXd input_gradient(const ResponseSpec& kind, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& x, const ForwardState& state);

}  // namespace ningarch
