#pragma once

#include "deepspace/baselines.hpp"
#include "deepspace/corpus.hpp"
#include "deepspace/eval.hpp"
#include "deepspace/hsoftmax.hpp"
#include "deepspace/manifest.hpp"
#include "deepspace/ranker.hpp"
#include "deepspace/space.hpp"
#include "deepspace/splits.hpp"
#include "deepspace/types.hpp"
