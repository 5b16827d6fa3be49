#pragma once

#include "greedymax/ascent.hpp"
#include "greedymax/baselines.hpp"
#include "greedymax/certify.hpp"
#include "greedymax/core.hpp"
#include "greedymax/errors.hpp"
#include "greedymax/io.hpp"
#include "greedymax/minmax.hpp"
#include "greedymax/rng.hpp"
#include "greedymax/testbed.hpp"
#include "greedymax/tuning.hpp"
