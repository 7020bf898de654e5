#pragma once

// Umbrella header for the sparse Tucker toolkit.

#include "stt/datagen.hpp"
#include "stt/errors.hpp"
#include "stt/io.hpp"
#include "stt/linalg.hpp"
#include "stt/rng.hpp"
#include "stt/tensor.hpp"
#include "stt/ttm.hpp"
#include "stt/tucker.hpp"
