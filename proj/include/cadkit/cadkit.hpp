#pragma once

#include "cadkit/core.hpp"
#include "cadkit/geometry.hpp"
#include "cadkit/transforms.hpp"
#include "cadkit/features.hpp"
#include "cadkit/analysis.hpp"
#include "cadkit/classify.hpp"
#include "cadkit/ensemble.hpp"
#include "cadkit/evaluation.hpp"
#include "cadkit/synth.hpp"
#include "cadkit/io.hpp"
