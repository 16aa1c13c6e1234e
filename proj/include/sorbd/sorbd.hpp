#pragma once

// Umbrella header.

#include "sorbd/bench.hpp"
#include "sorbd/bicomplex.hpp"
#include "sorbd/deriv_fo.hpp"
#include "sorbd/deriv_so_fd.hpp"
#include "sorbd/deriv_so_id.hpp"
#include "sorbd/deriv_types.hpp"
#include "sorbd/dynamics.hpp"
#include "sorbd/lie.hpp"
#include "sorbd/metrics.hpp"
#include "sorbd/model.hpp"
#include "sorbd/model_io.hpp"
#include "sorbd/oracles.hpp"
#include "sorbd/spatial.hpp"
#include "sorbd/tensor.hpp"
