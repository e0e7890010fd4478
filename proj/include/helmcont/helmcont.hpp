#pragma once

#include "helmcont/config.hpp"
#include "helmcont/continuation.hpp"
#include "helmcont/core.hpp"
#include "helmcont/experiments.hpp"
#include "helmcont/operator_b.hpp"
#include "helmcont/report.hpp"
#include "helmcont/spectral.hpp"
#include "helmcont/util.hpp"
