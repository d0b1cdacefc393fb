"""Support code: settings, exact linear algebra, the rational simplex, parallel reduction and JSON I/O."""
