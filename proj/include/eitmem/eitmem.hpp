#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "fock_sector.hpp"
#include "format.hpp"
#include "hamiltonian.hpp"
#include "input_state.hpp"
#include "mixing.hpp"
#include "mode_vector.hpp"
#include "oracle.hpp"
#include "propagator.hpp"
#include "schedule.hpp"
#include "verify.hpp"
