#pragma once

#include "diagnostics.hpp"
#include "geometry.hpp"
#include "mapspec.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "padic.hpp"
#include "periodic.hpp"
#include "preimage.hpp"
#include "ratmap.hpp"
#include "roots.hpp"
#include "screening.hpp"
#include "series.hpp"
#include "sphere.hpp"
