#ifndef MSLIFT_MSLIFT_HPP
#define MSLIFT_MSLIFT_HPP

#include "mslift/errors.hpp"
#include "mslift/multiset.hpp"
#include "mslift/value.hpp"
#include "mslift/distributions.hpp"
#include "mslift/lifted_state.hpp"
#include "mslift/dynamics.hpp"
#include "mslift/observation.hpp"
#include "mslift/ground_oracle.hpp"
#include "mslift/sampler.hpp"
#include "mslift/scenario_io.hpp"

#endif
