// afdm.hpp - umbrella header

#pragma once

#include "afdm/campaigns.hpp"
#include "afdm/channel.hpp"
#include "afdm/config.hpp"
#include "afdm/constellation.hpp"
#include "afdm/modem.hpp"
#include "afdm/phase_function.hpp"
#include "afdm/receiver.hpp"
#include "afdm/runner.hpp"
#include "afdm/security.hpp"
#include "afdm/simulation.hpp"
#include "afdm/sweeps.hpp"
#include "afdm/types.hpp"
