#pragma once

#include "pbr/controller.hpp"
#include "pbr/error.hpp"
#include "pbr/growth.hpp"
#include "pbr/light.hpp"
#include "pbr/numerics.hpp"
#include "pbr/optimizer.hpp"
#include "pbr/params.hpp"
#include "pbr/productivity.hpp"
#include "pbr/table.hpp"
