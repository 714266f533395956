#pragma once

#include "leafgeo/ambient.hpp"
#include "leafgeo/chart.hpp"
#include "leafgeo/flow.hpp"
#include "leafgeo/funcspec.hpp"
#include "leafgeo/leafscape.hpp"
#include "leafgeo/mesh.hpp"
#include "leafgeo/metriplectic.hpp"
#include "leafgeo/sampling.hpp"
#include "leafgeo/verify.hpp"
