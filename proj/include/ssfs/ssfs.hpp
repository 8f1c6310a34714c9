#pragma once

#include "ssfs/classify.hpp"
#include "ssfs/common.hpp"
#include "ssfs/dataio.hpp"
#include "ssfs/evolve.hpp"
#include "ssfs/lfa.hpp"
#include "ssfs/pipeline.hpp"
#include "ssfs/random.hpp"
#include "ssfs/redundancy.hpp"
#include "ssfs/report.hpp"
#include "ssfs/stats.hpp"
#include "ssfs/synth.hpp"
