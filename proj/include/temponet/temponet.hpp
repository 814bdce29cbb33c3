#pragma once

#include "temponet/errors.hpp"
#include "temponet/evolution.hpp"
#include "temponet/fitting.hpp"
#include "temponet/generators.hpp"
#include "temponet/ingest.hpp"
#include "temponet/io.hpp"
#include "temponet/metrics.hpp"
#include "temponet/random.hpp"
#include "temponet/temporal_graph.hpp"
