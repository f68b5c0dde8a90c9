#pragma once

#define SVOLTERRA_VERSION "0.1.0"
