// coopdecay.hpp: umbrella header.

#pragma once

#include "coopdecay/units.hpp"
#include "coopdecay/error.hpp"
#include "coopdecay/rng.hpp"
#include "coopdecay/geometry.hpp"
#include "coopdecay/interactions.hpp"
#include "coopdecay/spectral.hpp"
#include "coopdecay/dynamics.hpp"
#include "coopdecay/entanglement.hpp"
#include "coopdecay/ensemble.hpp"
#include "coopdecay/csv.hpp"
#include "coopdecay/config.hpp"
#include "coopdecay/runner.hpp"
#include "coopdecay/version.hpp"
