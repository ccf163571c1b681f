#pragma once

#include "analytic.hpp"
#include "coin.hpp"
#include "entanglement.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "geometry.hpp"
#include "observables.hpp"
#include "seed.hpp"
#include "smoothing_spline.hpp"
#include "walk.hpp"
