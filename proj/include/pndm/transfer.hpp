#ifndef PNDM_TRANSFER_HPP
#define PNDM_TRANSFER_HPP

#include "pndm/predictor.hpp"
#include "pndm/schedule.hpp"
#include "pndm/types.hpp"

namespace pndm {

// Nonlinear transfer part: maps the state at t to t_next given the predicted
// noise eps,
//
//   phi = sqrt(ab'/ab) x - (ab' - ab) /
//         (sqrt(ab) (sqrt((1-ab') ab) + sqrt((1-ab) ab'))) eps
//
// with ab = alpha_bar(t), ab' = alpha_bar(t_next). Both directions are
// supported (t_next above or below t). phi(x, eps, t, t) returns x exactly.
StateVec phi(const StateVec& x, const StateVec& eps, double t, double t_next,
             const Schedule& schedule);

// One deterministic denoising update: phi with eps taken from the predictor at (x, t).
StateVec ddim_step(const StateVec& x, double t, double t_next, const NoisePredictor& predictor,
                   const Schedule& schedule);

}  // namespace pndm

#endif  // PNDM_TRANSFER_HPP
