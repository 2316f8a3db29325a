#pragma once

// Infinite Feature Selection: graph-based feature ranking via the closed-form
// matrix geometric series, with automatic subset selection and evaluation.

#include "inffs/data.hpp"
#include "inffs/errors.hpp"
#include "inffs/eval.hpp"
#include "inffs/graph.hpp"
#include "inffs/ranking.hpp"
#include "inffs/selection.hpp"
#include "inffs/synth.hpp"
