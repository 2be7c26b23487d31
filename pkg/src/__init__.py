"""SilentLedger auditable anonymous payments."""
