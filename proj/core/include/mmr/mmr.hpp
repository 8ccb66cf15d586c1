#pragma once

// Umbrella header for the moment-matching registration library.

#include <mmr/bfgs.hpp>
#include <mmr/centers.hpp>
#include <mmr/core.hpp>
#include <mmr/csv.hpp>
#include <mmr/error.hpp>
#include <mmr/icp.hpp>
#include <mmr/kernel_moments.hpp>
#include <mmr/metrics.hpp>
#include <mmr/parallel.hpp>
#include <mmr/ply.hpp>
#include <mmr/random.hpp>
#include <mmr/registration.hpp>
#include <mmr/synth.hpp>
