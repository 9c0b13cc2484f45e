#pragma once

#include "noisynn/data_matrix.hpp"
#include "noisynn/dataset_diagnostics.hpp"
#include "noisynn/dimred.hpp"
#include "noisynn/experiments.hpp"
#include "noisynn/error.hpp"
#include "noisynn/io.hpp"
#include "noisynn/linalg.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/parallel.hpp"
#include "noisynn/rng.hpp"
#include "noisynn/signal_geometry.hpp"
#include "noisynn/simulation.hpp"
#include "noisynn/stats.hpp"
#include "noisynn/summation.hpp"
#include "noisynn/version.hpp"
