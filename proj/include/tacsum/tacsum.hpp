#pragma once

#include "tacsum/clusterer.hpp"
#include "tacsum/evaluator.hpp"
#include "tacsum/io.hpp"
#include "tacsum/model.hpp"
#include "tacsum/partitioner.hpp"
#include "tacsum/pipeline.hpp"
#include "tacsum/plot.hpp"
#include "tacsum/reducer.hpp"
#include "tacsum/sampler.hpp"
#include "tacsum/scorer.hpp"
