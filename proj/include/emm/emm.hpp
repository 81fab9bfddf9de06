#pragma once

// Umbrella header.

#include "config.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "embed.hpp"
#include "emd.hpp"
#include "hilbert.hpp"
#include "metrics.hpp"
#include "multiview.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "scan.hpp"
#include "simplex.hpp"
#include "smap.hpp"
#include "synth.hpp"
#include "version.hpp"
