#pragma once

#include "kakeya/grid/geometry.hpp"
#include "kakeya/grid/shading.hpp"
#include "kakeya/grid/slices.hpp"
