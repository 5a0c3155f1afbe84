"""Column schema of the India air-quality CSV export."""

KEY_COLUMNS = ("City", "Date")

# Pollutant columns, in file order. Particulates and gases are ug/m3, CO mg/m3.
FEATURE_COLUMNS = (
    "PM2.5",
    "PM10",
    "NO",
    "NO2",
    "NOx",
    "NH3",
    "CO",
    "SO2",
    "O3",
    "Benzene",
    "Toluene",
    "Xylene",
)

SCHEMA_COLUMNS = KEY_COLUMNS + FEATURE_COLUMNS

# Pollutants entering the AQI formula: mean over the first set, max over the second.
AQI_MEAN_POLLUTANTS = ("PM2.5", "PM10", "SO2", "NOx", "NH3")
AQI_MAX_POLLUTANTS = ("CO", "O3")
AQI_POLLUTANTS = AQI_MEAN_POLLUTANTS + AQI_MAX_POLLUTANTS

# Cell texts treated as missing (case-insensitive, after stripping).
MISSING_SENTINELS = frozenset({"", "na", "nan"})
