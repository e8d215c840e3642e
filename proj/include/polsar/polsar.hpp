#pragma once

// Umbrella header for the polsar library: the multiplicative
// backscatter-times-speckle model for multi-look polarimetric covariance
// data, moment-based roughness estimation, radial B-spline boundary
// detection, and the Monte Carlo edge-error harness.

#include "bessel.hpp"      // IWYU pragma: export
#include "bspline.hpp"     // IWYU pragma: export
#include "contour.hpp"     // IWYU pragma: export
#include "core.hpp"        // IWYU pragma: export
#include "distributions.hpp"  // IWYU pragma: export
#include "estimation.hpp"  // IWYU pragma: export
#include "evaluation.hpp"  // IWYU pragma: export
#include "raster.hpp"      // IWYU pragma: export
#include "rng.hpp"         // IWYU pragma: export
#include "scene.hpp"       // IWYU pragma: export
#include "serialize.hpp"   // IWYU pragma: export
