#pragma once

#include "vfl/ambiguity.hpp"
#include "vfl/errors.hpp"
#include "vfl/geometry.hpp"
#include "vfl/hole_fill.hpp"
#include "vfl/image.hpp"
#include "vfl/metrics.hpp"
#include "vfl/pipeline.hpp"
#include "vfl/png_io.hpp"
#include "vfl/presets.hpp"
#include "vfl/receptive_field.hpp"
#include "vfl/rng.hpp"
#include "vfl/splat.hpp"
#include "vfl/synth.hpp"
