#pragma once

#include "qsched/bits.hpp"
#include "qsched/dnl.hpp"
#include "qsched/experiments.hpp"
#include "qsched/io.hpp"
#include "qsched/ising.hpp"
#include "qsched/jssp.hpp"
#include "qsched/oracle.hpp"
#include "qsched/qaoa.hpp"
#include "qsched/qubo.hpp"
#include "qsched/rng.hpp"
#include "qsched/simulator.hpp"
#include "qsched/varqite.hpp"
