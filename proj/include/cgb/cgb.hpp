#pragma once

#include "cgb/curvature.hpp"
#include "cgb/entropy.hpp"
#include "cgb/error.hpp"
#include "cgb/gnn.hpp"
#include "cgb/graph.hpp"
#include "cgb/metrics.hpp"
#include "cgb/pipeline.hpp"
#include "cgb/random.hpp"
#include "cgb/rewiring.hpp"
#include "cgb/signal.hpp"
#include "cgb/types.hpp"
