#pragma once

#include "nswstv/ballots_io.hpp"
#include "nswstv/count_engine.hpp"
#include "nswstv/decimal.hpp"
#include "nswstv/election.hpp"
#include "nswstv/last_parcel.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/simulation.hpp"
#include "nswstv/simulation_report.hpp"
#include "nswstv/surplus.hpp"
#include "nswstv/tiebreak.hpp"
#include "nswstv/transcript.hpp"
