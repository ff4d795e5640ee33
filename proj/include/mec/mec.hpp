#pragma once

// Umbrella header for the exact minimum-entropy coupling library.

#include "mec/cells.hpp"
#include "mec/coupling.hpp"
#include "mec/distribution.hpp"
#include "mec/entropy.hpp"
#include "mec/enumerate.hpp"
#include "mec/errors.hpp"
#include "mec/local_opt.hpp"
#include "mec/peeling.hpp"
#include "mec/rational.hpp"
#include "mec/support_graph.hpp"
