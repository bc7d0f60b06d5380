"""Distinguished varieties in the polydisc via matrix pencils."""
