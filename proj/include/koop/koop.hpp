#pragma once

// Umbrella header for the koop toolkit.

#include "koop/bench.hpp"
#include "koop/cholesky.hpp"
#include "koop/csv.hpp"
#include "koop/dictionary.hpp"
#include "koop/error.hpp"
#include "koop/koopman.hpp"
#include "koop/matrix.hpp"
#include "koop/model_io.hpp"
#include "koop/oscillator.hpp"
#include "koop/pinv.hpp"
#include "koop/random.hpp"
#include "koop/snapshot.hpp"
#include "koop/spectrum.hpp"
#include "koop/version.hpp"
