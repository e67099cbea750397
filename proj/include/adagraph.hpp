#pragma once

#include <adagraph/adam.hpp>
#include <adagraph/config.hpp>
#include <adagraph/error.hpp>
#include <adagraph/export.hpp>
#include <adagraph/filter.hpp>
#include <adagraph/graph.hpp>
#include <adagraph/hsi.hpp>
#include <adagraph/kmeans.hpp>
#include <adagraph/metrics.hpp>
#include <adagraph/objective.hpp>
#include <adagraph/pipeline.hpp>
#include <adagraph/selftrain.hpp>
#include <adagraph/spectral.hpp>
#include <adagraph/structure.hpp>
#include <adagraph/superpixel.hpp>
#include <adagraph/synth.hpp>
#include <adagraph/train.hpp>
#include <adagraph/types.hpp>
