#pragma once

#include "fcg/appearance.hpp"
#include "fcg/clustering.hpp"
#include "fcg/core.hpp"
#include "fcg/geometry.hpp"
#include "fcg/io_mot.hpp"
#include "fcg/metrics.hpp"
#include "fcg/pipeline.hpp"
#include "fcg/synthdata.hpp"
#include "fcg/weighting.hpp"
