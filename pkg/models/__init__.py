# Models module - Pydantic models de configuración y reportes
