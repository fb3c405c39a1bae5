#pragma once

#include "peakcast/pipeline_core.hpp"
#include "peakcast/pipeline_predict.hpp"
#include "peakcast/pipeline_cluster.hpp"
#include "peakcast/pipeline_classify.hpp"
