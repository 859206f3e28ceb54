// ccme.hpp: umbrella header

#pragma once

#include "ccme/errors.hpp"
#include "ccme/model.hpp"
#include "ccme/operators.hpp"
#include "ccme/cc_mapping.hpp"
#include "ccme/dissipators.hpp"
#include "ccme/dynamics.hpp"
#include "ccme/oracles.hpp"
#include "ccme/config.hpp"
#include "ccme/io.hpp"
#include "ccme/experiments.hpp"
